"""
Utilities package for functionality shared by the CLI, scripts and library.
Includes logging setup, project metadata for run manifests and console report display.
"""
