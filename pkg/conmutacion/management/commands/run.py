from conmutacion.constants import SALIDA_OK
from conmutacion.services.escenario import run_scenario

from ._base import ComandoEscenario


class Command(ComandoEscenario):
    help = 'Ejecuta todos los análisis del escenario y escribe reportes, trayectorias y manifiesto'
    salida_obligatoria = True

    def ejecutar(self, escenario, options):
        self.stdout.write(f'Escenario {escenario.name}: {", ".join(escenario.ordered_analyses)}')
        codigo, manifiesto = run_scenario(escenario, options['out'])
        for entrada in manifiesto['files']:
            self.stdout.write(f"  {entrada['path']}  {entrada['sha256'][:12]}")
        for nota in manifiesto['notes']:
            self.stdout.write(self.style.WARNING(nota))
        if codigo != SALIDA_OK:
            self.fallar(f"Verificaciones fallidas: {', '.join(manifiesto['failed'])}")
        self.stdout.write(self.style.SUCCESS('Todas las verificaciones aprobadas.'))
