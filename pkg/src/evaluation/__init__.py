"""
Módulo de avaliação.
Grafos sintéticos (SBM), amostras de pares, métricas, especificação de experimentos e
harness de treino/avaliação entre grafos.
"""
