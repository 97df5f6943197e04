# Simulador multi-haz de precodificación multicast
