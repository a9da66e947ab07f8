# distance_transform/__init__.py