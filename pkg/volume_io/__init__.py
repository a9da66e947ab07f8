# volume_io/__init__.py