# Sphinx configuration for the slimreg documentation.
import os
import sys
sys.path.insert(0, os.path.abspath('../..'))

project = 'slimmable-regularization'
copyright = '2026, slimreg developers'
author = 'slimreg developers'
release = '0.1.0'

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.napoleon',
    'sphinx.ext.autosummary',
    'sphinx.ext.autosectionlabel',
    'sphinx_automodapi.automodapi',
    'sphinx_rtd_theme'
]

autodoc_default_options = {
    'members': True,
    'undoc-members': True,
    'show-inheritance': True
}
autosummary_generate = True
autodoc_inherit_docstrings = True

# heavy dependencies are not needed to render docstrings
autodoc_mock_imports = [
    'torch',
    'tensorboardX',
    'matplotlib',
]

templates_path = ['_templates']
exclude_patterns = []

html_theme = 'sphinx_rtd_theme'
html_static_path = ['_static']
