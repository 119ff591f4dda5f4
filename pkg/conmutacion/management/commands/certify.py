from pathlib import Path

from conmutacion.services.escenario import caja_por_defecto
from conmutacion.services.exportaciones import write_json
from conmutacion.services.lyapunov import check_certificate

from ._base import ComandoEscenario


class Command(ComandoEscenario):
    help = 'Chequea por muestreo el sándwich y el decaimiento de cada certificado de Lyapunov'
    opciones = ('out', 'seed')

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--samples', type=int, help='Cantidad de muestras (reemplaza numeric.samples)')

    def ejecutar(self, escenario, options):
        caja = list(escenario.certify_box) if escenario.certify_box is not None else caja_por_defecto(escenario.system)
        muestras = options.get('samples') or escenario.samples
        reportes = [check_certificate(sub, caja, muestras, escenario.seed) for sub in escenario.system]

        for reporte in reportes:
            linea = (
                f'{reporte.label}: {reporte.samples_tested} muestras, '
                f'{len(reporte.sandwich_violations)} fallas de sándwich, '
                f'{len(reporte.decay_violations)} de decaimiento'
            )
            self.stdout.write(self.style.SUCCESS(linea) if reporte.passed else self.style.WARNING(linea))

        if options.get('out'):
            ruta = write_json({
                'kind': 'certify',
                'box': caja,
                'passed': all(r.passed for r in reportes),
                'reports': [r.as_dict() for r in reportes],
            }, Path(options['out']) / 'certify.json')
            self.stdout.write(f'Reporte escrito en {ruta}')

        if not all(r.passed for r in reportes):
            self.fallar('Al menos un certificado no se cumple en las muestras.')
