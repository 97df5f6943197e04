# API del simulador
