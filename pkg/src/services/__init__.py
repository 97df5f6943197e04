# Servicios del simulador
