# preproc/__init__.py