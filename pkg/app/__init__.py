"""uimlc - UIML multi-platform UI compiler"""
__version__ = "1.0.0"
