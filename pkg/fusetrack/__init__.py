"""Top-level package for FuseTrack."""

__author__ = """Hex Informatica LTDA"""
__email__ = 'contato@hexgis.com'
__version__ = '0.2.0'
