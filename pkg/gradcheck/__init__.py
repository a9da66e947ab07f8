# gradcheck/__init__.py