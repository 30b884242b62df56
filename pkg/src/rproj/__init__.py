"""
Módulo de projeções aleatórias.
Inicializa R^(0) e propaga R^(k) = A R^(k-1) pela matriz de transição.
"""
