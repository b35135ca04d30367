import csv
import json
import os
import numpy as np
from slimreg.trainer import METRICS_FIELDS, MetricsRecord

METRICS_FILE = 'metrics.csv'


def mean_std(values):
    '''Mean and population standard deviation; (0, 0) for no values.'''
    if len(values) == 0:
        return 0., 0.
    return float(np.mean(values)), float(np.std(values))


def read_metrics(path):
    '''Parse a metrics CSV written by emit_metrics.'''
    with open(path, newline='') as csvfile:
        reader = csv.DictReader(csvfile)
        if tuple(reader.fieldnames or ()) != METRICS_FIELDS:
            raise ValueError("{} does not have the metrics header {}".format(path, ','.join(METRICS_FIELDS)))
        return [MetricsRecord.from_row(row) for row in reader]


def summarize_records(records):
    '''Per split: number of rows, mean and final top-1/top-5 and the best top-1.'''
    summary = {}
    for split in sorted({record.split for record in records}):
        rows = [record for record in records if record.split == split]
        summary[split] = {
            'records': len(rows),
            'top1_mean': mean_std([row.top1 for row in rows])[0],
            'top5_mean': mean_std([row.top5 for row in rows])[0],
            'top1_final': rows[-1].top1,
            'top5_final': rows[-1].top5,
            'top1_best': max(row.top1 for row in rows),
        }
    return summary


def emit_metrics(records, path):
    '''
    Append MetricsRecords to a CSV file and rewrite its JSON summary.

    The CSV header (epoch,split,top1,top5,loss_f,mean_loss_sub,lr,wall_time) is
    written only when the file is new or empty, so repeated calls append. The
    summary next to it (same name, ``.json``) always covers every row in the file.

    Returns:
        (str, str): Paths of the CSV and JSON files.
    '''
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    new = not os.path.exists(path) or os.path.getsize(path) == 0
    with open(path, 'a', newline='') as csvfile:
        writer = csv.writer(csvfile)
        if new:
            writer.writerow(METRICS_FIELDS)
        for record in records:
            writer.writerow(record.row())
    json_path = os.path.splitext(path)[0] + '.json'
    with open(json_path, 'w') as f:
        json.dump(summarize_records(read_metrics(path)), f, indent=2, sort_keys=True)
    return path, json_path
