"""
Módulo de grafos.
Estruturas esparsas imutáveis, matrizes de transição, projeção bipartida e divisão de nós.
"""
