"""
Módulo de visualização.
Gráficos dos experimentos: métricas por grafo, curvas de treino e erros das features.
"""
