"""
Base común de los comandos: lectura del escenario, ajustes desde la línea de comandos y
traducción de errores a códigos de salida.
"""

from pathlib import Path

from django.core.exceptions import ValidationError
from django.core.management.base import BaseCommand, CommandError

from conmutacion.constants import SALIDA_ERROR_ENTRADA, SALIDA_VERIFICACION_FALLIDA
from conmutacion.excepciones import ErrorConmutacion
from conmutacion.forms import parse_scenario


class VerificacionFallida(Exception):
    pass


class ComandoEscenario(BaseCommand):
    # flags opcionales que acepta cada comando además de --scenario
    opciones = ('out', 'step', 'eps', 'seed')
    salida_obligatoria = False

    def add_arguments(self, parser):
        parser.add_argument('--scenario', type=str, required=True, help='Archivo de escenario (TOML)')
        if 'out' in self.opciones:
            parser.add_argument('--out', type=str, required=self.salida_obligatoria, help='Directorio de salida')
        if 'step' in self.opciones:
            parser.add_argument('--step', type=float, help='Paso de integración (reemplaza numeric.step)')
        if 'eps' in self.opciones:
            parser.add_argument('--eps', type=float, help='Nivel eps (reemplaza analysis.eps)')
        if 'seed' in self.opciones:
            parser.add_argument('--seed', type=int, help='Semilla (reemplaza numeric.seed)')

    def cargar_escenario(self, options):
        ruta = Path(options['scenario'])
        texto = ruta.read_text(encoding='utf-8')
        ajustes = {}
        if options.get('step') is not None:
            ajustes['numeric.step'] = options['step']
        if options.get('eps') is not None:
            ajustes['analysis.eps'] = options['eps']
        if options.get('seed') is not None:
            ajustes['numeric.seed'] = options['seed']
        return parse_scenario(texto, nombre=ruta.stem, ajustes=ajustes)

    def handle(self, *args, **options):
        try:
            escenario = self.cargar_escenario(options)
            self.ejecutar(escenario, options)
        except VerificacionFallida as error:
            raise CommandError(str(error), returncode=SALIDA_VERIFICACION_FALLIDA)
        except ValidationError as error:
            raise CommandError('Escenario inválido: ' + '; '.join(error.messages), returncode=SALIDA_ERROR_ENTRADA)
        except ErrorConmutacion as error:
            raise CommandError(str(error), returncode=error.codigo_salida)
        except OSError as error:
            raise CommandError(f'Error de archivo: {error}', returncode=SALIDA_ERROR_ENTRADA)

    def ejecutar(self, escenario, options):
        raise NotImplementedError

    def fallar(self, mensaje):
        self.stdout.write(self.style.ERROR(mensaje))
        raise VerificacionFallida(mensaje)
