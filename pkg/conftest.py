# Корень репозитория в sys.path: `pytest` из любого каталога находит пакет sparseica
