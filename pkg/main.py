#!/usr/bin/env python3
"""
Punto de entrada principal del motor de programas de Sarkisov horosféricos
"""

import argparse
import os
import sys
from pathlib import Path
from typing import List, Optional

# Agregar directorio raíz al path
sys.path.insert(0, str(Path(__file__).parent))

from config.settings import DEFAULT_CONFIG, EngineConfig  # noqa: E402
from core.errors import GenericityError, HypothesisError, SarkisovError  # noqa: E402
from core.family import check_genericity, classify_point, decompose  # noqa: E402
from core.fixtures import dump_fixture, load_fixture  # noqa: E402
from core.mmp import run_hmmp  # noqa: E402
from core.plotting import emit_svg  # noqa: E402
from core import report  # noqa: E402
from core.sarkisov import check_hypotheses, mori_chain, run_sarkisov  # noqa: E402
from utils.helpers import helpers  # noqa: E402
from utils.logger import log_function_call, set_log_level, setup_logger  # noqa: E402

__version__ = "1.0.0"

# Configurar logging
logger = setup_logger('main')

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_GENERICITY = 3
EXIT_INTERNAL = 4


def parse_arguments(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """Parsea argumentos de línea de comandos"""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--json', action='store_true', help='Salida JSON con claves ordenadas')
    common.add_argument('--config', type=str, help='Archivo de configuración JSON o YAML')
    common.add_argument(
        '--log-level',
        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'],
        help='Nivel de logging (por defecto LOG_LEVEL)'
    )

    parser = argparse.ArgumentParser(
        description='Programas de Sarkisov para familias de polítopos horosféricos',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Ejemplos de uso:
  python main.py check fixtures/toric-f2.json
  python main.py classify fixtures/toric-f2.json --delta 1/2 --epsilon 0
  python main.py mmp fixtures/toric-f2.json --delta 0
  python main.py sarkisov fixtures/horo-rank1.json --json
  python main.py plot fixtures/toric-f2.json --out toric.svg
        """
    )
    parser.add_argument('--version', action='version', version=f'sarkisov-horo v{__version__}')

    commands = parser.add_subparsers(dest='command', required=True)

    def command(name: str, help_text: str) -> argparse.ArgumentParser:
        sub = commands.add_parser(name, help=help_text, parents=[common])
        sub.add_argument('fixture', type=str, help='Fixture JSON de la familia')
        return sub

    command('check', 'Valida el fixture, la genericidad y las hipótesis')
    command('decompose', 'Celdas, paredes y puntos de Ω_∅')
    mmp = command('mmp', 'HMMP a δ fijo')
    mmp.add_argument('--delta', required=True, type=helpers.parse_rational)
    mmp.add_argument('--epsilon-start', default='0', type=helpers.parse_rational)
    command('sarkisov', 'Programa de Sarkisov de X/S a Y/T')
    classify = command('classify', 'Clase de un punto (δ, ε)')
    classify.add_argument('--delta', required=True, type=helpers.parse_rational)
    classify.add_argument('--epsilon', required=True, type=helpers.parse_rational)
    plot = command('plot', 'Figura SVG de la descomposición')
    plot.add_argument('--out', required=True, type=str)
    normalize = command('normalize', 'Reescribe el fixture en forma canónica')
    normalize.add_argument('--out', type=str, help='Archivo de salida (por defecto stdout)')

    return parser.parse_args(argv)


def load_configuration(args: argparse.Namespace) -> EngineConfig:
    """Carga la configuración según los argumentos"""
    if args.config:
        config = EngineConfig.load_from_file(args.config)
        logger.info(f"Configuración cargada desde: {args.config}")
        return config
    return DEFAULT_CONFIG


def _emit(args: argparse.Namespace, data, text_renderer) -> None:
    sys.stdout.write(report.to_json(data) if args.json else text_renderer(data))


@log_function_call(logger)
def cmd_check(args, config) -> int:
    family = load_fixture(args.fixture)
    certificate = check_genericity(family)
    hypotheses = check_hypotheses(family)
    _emit(args, report.genericity_data(certificate, hypotheses), report.genericity_text)
    if not certificate.passed:
        return EXIT_GENERICITY
    if hypotheses:
        return EXIT_VALIDATION
    return EXIT_OK


@log_function_call(logger)
def cmd_decompose(args, config) -> int:
    family = load_fixture(args.fixture)
    decomposition = decompose(family, config=config)
    _emit(args, report.decomposition_data(family, decomposition, config), report.decomposition_text)
    return EXIT_OK


@log_function_call(logger)
def cmd_mmp(args, config) -> int:
    family = load_fixture(args.fixture)
    run = run_hmmp(family, args.delta, args.epsilon_start, config)
    _emit(args, report.hmmp_data(family, run), report.hmmp_text)
    return EXIT_OK


@log_function_call(logger)
def cmd_sarkisov(args, config) -> int:
    family = load_fixture(args.fixture)
    program = run_sarkisov(family, config=config)
    _emit(args, report.program_data(family, program), report.program_text)
    return EXIT_OK


@log_function_call(logger)
def cmd_classify(args, config) -> int:
    family = load_fixture(args.fixture)
    found = classify_point(family, args.delta, args.epsilon)
    _emit(args, report.classify_data(family, found), report.classify_text)
    return EXIT_OK


@log_function_call(logger)
def cmd_plot(args, config) -> int:
    family = load_fixture(args.fixture)
    decomposition = decompose(family, config=config)
    try:
        chain = mori_chain(family, config, decomposition.genericity)
    except HypothesisError as e:
        logger.warning(f"Figura sin cadena de Mori: {e}")
        chain = None
    counts = emit_svg(family, decomposition, chain, args.out, config)
    data = {'out': args.out, 'counts': counts}
    _emit(args, data, lambda d: "".join(f"{k}: {v}\n" for k, v in sorted(d['counts'].items())))
    return EXIT_OK


@log_function_call(logger)
def cmd_normalize(args, config) -> int:
    family = load_fixture(args.fixture)
    text = dump_fixture(family)
    if args.out:
        Path(args.out).write_text(text, encoding='utf-8')
        logger.info(f"Fixture normalizado en {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


COMMANDS = {
    'check': cmd_check,
    'decompose': cmd_decompose,
    'mmp': cmd_mmp,
    'sarkisov': cmd_sarkisov,
    'classify': cmd_classify,
    'plot': cmd_plot,
    'normalize': cmd_normalize,
}


def cli_main(argv: Optional[List[str]] = None) -> int:
    """Función principal; devuelve el código de salida"""
    try:
        args = parse_arguments(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_VALIDATION

    # Configurar logging
    if args.log_level:
        os.environ['LOG_LEVEL'] = args.log_level
        set_log_level(args.log_level)

    try:
        config = load_configuration(args)
        return COMMANDS[args.command](args, config)
    except GenericityError as e:
        logger.error(f"Datos no genéricos: {e}")
        for violation in e.violations:
            logger.error(f"  {violation.kind}: {violation.detail}")
        return e.exit_code
    except SarkisovError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code
    except ValueError as e:
        logger.error(f"Entrada inválida: {e}")
        return EXIT_VALIDATION
    except Exception:
        logger.exception("Error interno")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(cli_main())
