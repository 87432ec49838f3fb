# SPDX-License-Identifier: MIT
"""
Permite ejecutar el laboratorio como módulo (`python -m monge_lab`).
"""

from .cli import main

main()
