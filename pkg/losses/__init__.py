# losses/__init__.py