# optimdemo/__init__.py