"""
Exportación de resultados: CSV de trayectorias, reportes JSON, manifiesto con hashes,
datos para gráficos y la tabla de permanencias en Excel.
"""

import csv
import hashlib
import json
import logging
from datetime import datetime
from pathlib import Path

import numpy as np
from django.utils.text import slugify
from openpyxl import Workbook
from openpyxl.styles import Alignment, Border, Font, PatternFill, Side
from openpyxl.utils import get_column_letter

from ..constants import formatear_real, parametro
from ..excepciones import UnsupportedDimension
from ..models import evaluar_lote
from .lyapunov import region_boundary_points

logger = logging.getLogger(__name__)

NOMBRE_MANIFIESTO = 'manifest.json'


def _escritor(archivo):
    return csv.writer(archivo, lineterminator='\n')


def write_trajectory_csv(traj, system, ruta):
    """
    Columnas t, x1..xn, mode, V_active (V del modo rotulado en cada muestra).
    """
    ruta = Path(ruta)
    ruta.parent.mkdir(parents=True, exist_ok=True)
    valores = np.empty(len(traj))
    for modo in set(traj.modes):
        indices = np.array([i for i, m in enumerate(traj.modes) if m == modo])
        valores[indices] = np.atleast_1d(evaluar_lote(system[modo].lyapunov, traj.states[indices]))

    with ruta.open('w', newline='', encoding='utf-8') as archivo:
        escritor = _escritor(archivo)
        escritor.writerow(['t'] + [f'x{j}' for j in range(1, traj.dimension + 1)] + ['mode', 'V_active'])
        for t, x, modo, v in zip(traj.times, traj.states, traj.modes, valores):
            escritor.writerow([formatear_real(t)] + [formatear_real(c) for c in x] + [modo, formatear_real(v)])
    return ruta


def write_json(datos, ruta):
    ruta = Path(ruta)
    ruta.parent.mkdir(parents=True, exist_ok=True)
    texto = json.dumps(datos, indent=2, sort_keys=True, ensure_ascii=False)
    ruta.write_text(texto + '\n', encoding='utf-8')
    return ruta


def sha256_archivo(ruta):
    return hashlib.sha256(Path(ruta).read_bytes()).hexdigest()


def write_manifest(out_dir, archivos, extra=None):
    """
    manifest.json con ruta relativa, tamaño y sha256 de cada archivo escrito.
    """
    out_dir = Path(out_dir)
    entradas = []
    for ruta in sorted({Path(r) for r in archivos}):
        entradas.append({
            'path': ruta.relative_to(out_dir).as_posix(),
            'bytes': ruta.stat().st_size,
            'sha256': sha256_archivo(ruta),
        })
    entradas.sort(key=lambda e: e['path'])
    manifiesto = {'files': entradas}
    if extra:
        manifiesto.update(extra)
    write_json(manifiesto, out_dir / NOMBRE_MANIFIESTO)
    return manifiesto


def _nombre_modo(rotulo):
    return slugify(str(rotulo)) or 'modo'


def emit_plot_data(traj, system, eps, out_dir, count=None, nombre='trajectory.csv'):
    """
    trajectory.csv, region_<modo>.csv (polilínea cerrada de {V = eps}) y switch_points.csv.
    """
    if system.dimension != 2:
        raise UnsupportedDimension(f'Los datos de gráfico requieren dimensión 2 (el sistema es {system.dimension}).')
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if count is None:
        count = max(parametro('PUNTOS_FRONTERA'), 64)

    archivos = [write_trajectory_csv(traj, system, out_dir / nombre)]

    for sub in system:
        puntos = region_boundary_points(sub, eps, count)
        ruta = out_dir / f'region_{_nombre_modo(sub.label)}.csv'
        with ruta.open('w', newline='', encoding='utf-8') as archivo:
            escritor = _escritor(archivo)
            escritor.writerow(['x1', 'x2'])
            for x in np.vstack((puntos, puntos[:1])):
                escritor.writerow([formatear_real(c) for c in x])
        archivos.append(ruta)

    ruta = out_dir / 'switch_points.csv'
    with ruta.open('w', newline='', encoding='utf-8') as archivo:
        escritor = _escritor(archivo)
        escritor.writerow(['index', 't', 'prev_mode', 'next_mode', 'x1', 'x2', 'V_next'])
        for evento in traj.switch_events:
            valor = float(evaluar_lote(system[evento.next_mode].lyapunov, evento.state))
            escritor.writerow(
                [evento.index, formatear_real(evento.time), evento.prev_mode, evento.next_mode]
                + [formatear_real(c) for c in evento.state]
                + [formatear_real(valor)]
            )
    archivos.append(ruta)
    logger.info('Datos de gráfico escritos en %s (%d archivos)', out_dir, len(archivos))
    return archivos


def crear_estilos_excel():
    return {
        'titulo': Font(name='Arial', size=14, bold=True),
        'encabezado_font': Font(name='Arial', size=12, bold=True, color='FFFFFF'),
        'encabezado_fill': PatternFill(start_color='366092', end_color='366092', fill_type='solid'),
        'centrado': Alignment(horizontal='center', vertical='center'),
        'derecha': Alignment(horizontal='right', vertical='center'),
        'borde': Border(
            left=Side(style='thin'), right=Side(style='thin'),
            top=Side(style='thin'), bottom=Side(style='thin')
        ),
    }


def export_dwell_excel(tabla, ruta, titulo=None):
    """
    Tabla de permanencias T^eps por transición en una hoja con título, fecha y encabezados.
    """
    columnas = [
        ('Desde', 'from', 'texto'),
        ('Hacia', 'to', 'texto'),
        ('T^eps', 'T', 'decimal'),
        ('Fórmula sin truncar', 'raw', 'decimal'),
    ]
    datos = tabla.as_dict()['entries']
    wb = Workbook()
    ws = wb.active
    ws.title = 'Permanencias'
    estilos = crear_estilos_excel()
    ultima = get_column_letter(len(columnas))

    ws.merge_cells(f'A1:{ultima}1')
    celda_titulo = ws['A1']
    celda_titulo.value = titulo or f'Tiempos de permanencia (eps = {tabla.eps:g})'
    celda_titulo.font = estilos['titulo']
    celda_titulo.alignment = estilos['centrado']
    ws.row_dimensions[1].height = 25

    ws.merge_cells(f'A2:{ultima}2')
    celda_fecha = ws['A2']
    celda_fecha.value = f"Generado el: {datetime.now().strftime('%d/%m/%Y %H:%M:%S')}"
    celda_fecha.alignment = estilos['centrado']

    fila_encabezado = 3
    for idx, (nombre_col, _, _) in enumerate(columnas, start=1):
        celda = ws.cell(row=fila_encabezado, column=idx)
        celda.value = nombre_col
        celda.font = estilos['encabezado_font']
        celda.fill = estilos['encabezado_fill']
        celda.alignment = estilos['centrado']
        celda.border = estilos['borde']

    fila_actual = fila_encabezado + 1
    for item in datos:
        for idx, (_, clave, formato) in enumerate(columnas, start=1):
            celda = ws.cell(row=fila_actual, column=idx)
            valor = item.get(clave, '')
            if formato == 'decimal':
                celda.value = float(valor)
                celda.number_format = '0.000000'
                celda.alignment = estilos['derecha']
            else:
                celda.value = str(valor)
                celda.alignment = Alignment(horizontal='left', vertical='center')
            celda.border = estilos['borde']
        fila_actual += 1

    celda = ws.cell(row=fila_actual, column=1)
    celda.value = 'T_loc'
    celda.font = Font(name='Arial', bold=True)
    celda = ws.cell(row=fila_actual, column=3)
    celda.value = float(tabla.t_loc)
    celda.number_format = '0.000000'
    celda.font = Font(name='Arial', bold=True)

    for idx, (nombre_col, _, _) in enumerate(columnas, start=1):
        ws.column_dimensions[get_column_letter(idx)].width = max(len(nombre_col) + 2, 12)

    ruta = Path(ruta)
    if ruta.suffix != '.xlsx':
        ruta = ruta.with_suffix('.xlsx')
    ruta.parent.mkdir(parents=True, exist_ok=True)
    wb.save(ruta)
    return ruta


def write_tube_csv(muestras, dimension, ruta):
    """
    Una fila por punto de frontera propagado: t, x1..xn.
    """
    ruta = Path(ruta)
    ruta.parent.mkdir(parents=True, exist_ok=True)
    with ruta.open('w', newline='', encoding='utf-8') as archivo:
        escritor = _escritor(archivo)
        escritor.writerow(['t'] + [f'x{j}' for j in range(1, dimension + 1)])
        for t, puntos in muestras:
            for x in puntos:
                escritor.writerow([formatear_real(t)] + [formatear_real(c) for c in x])
    return ruta


def tube_filename(origen, destino):
    return f'tube_{_nombre_modo(origen)}_{_nombre_modo(destino)}.csv'
