"""
Módulo de exportação.
Gera relatórios dos experimentos e grava os artefatos binários do pipeline.
"""
