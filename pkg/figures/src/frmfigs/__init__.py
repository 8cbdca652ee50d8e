"""Figure scripts for condensate stability run artifacts.

Standalone consumers of the solver's file formats: run configurations,
observable and stability-map CSVs, threshold JSON, and binary field
snapshots.  Nothing here imports the solver package.
"""
