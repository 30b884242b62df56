"""
Módulo de carregamento de dados.
Responsável por ler listas de arestas e arquivos de rótulos em diferentes formatos.
"""
