# Interfaz de consola
