from setuptools import setup, find_packages

setup(
    name="slimmable-regularization",
    version="0.1.0",
    description=("Regularizing slimmable sub-networks with transformed inputs and soft labels in Pytorch"),
    packages=find_packages(),
    entry_points={
        'console_scripts': [
            'slimreg=scripts.run:main',
            'slimreg-plot=scripts.plot:main',
        ],
    },
    install_requires=[
        "numpy",                            # math library
        "matplotlib",                       # plotting library
        "tensorboardX",                     # tensorboard compatibility
        "tomli; python_version < '3.11'",   # config files on older pythons
    ],
    extras_require={
        "pytorch": [
            "torch",            # deep learning
        ],
        "docs": [
            "sphinx",
            "sphinx-autobuild",
            "sphinx-rtd-theme",
            "sphinx-automodapi"
        ],
        "dev": [
            "pylint",           # code quality tool
            "torch-testing"     # pytorch assertion library
        ]
    },
)
