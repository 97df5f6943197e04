# Modelos del simulador
