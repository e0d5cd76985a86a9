#!/usr/bin/env python
"""
wgqed.wgqed
===========

Command-line front end: single scattering runs, gate evaluations, memory
and remote-entanglement demonstrations, and parameter sweeps.

Exit codes are 0 on success, 2 for configuration errors and 3 when the
requested grid cannot resolve the problem.

"""
import sys
import time

import numpy as np

from wgqed.util import (BinOverlapError, ConfigError, GridError, ResolutionError,
                        StateError)

RUN_COMMANDS = ('scatter', 'gate', 'memory', 'remote')

# flag dest -> RunConfig field
FLAG_FIELDS = {'P': 'purcell', 'P_b': 'purcell_b', 'gamma_1d': 'gamma_1d', 'delta': 'delta',
               'pulse': 'pulse', 'gamma_pulse': 'gamma_pulse', 'sigma': 'sigma', 't0': 't0',
               'duration': 'duration', 'rise': 'rise', 'dt': 'dt', 't_end': 't_end',
               'method': 'method', 'protocol': 'protocol', 'wfc': 'wfc', 'wfc_k': 'wfc_k',
               'coupling_boost': 'coupling_boost', 'bin_separation': 'bin_separation',
               'photon_state': 'photon_state', 'emitter_state': 'emitter_state',
               'measurement': 'measurement', 'format': 'format', 'out': 'out',
               'dump_envelopes': 'dump_envelopes'}


def parse(options=None, log=None):
    """Parse input arguments to the wgqed script.

    """
    import argparse

    from wgqed.io import FORMAT_CHOICES, GATE_PROTOCOLS, PRESETS, PULSE_CHOICES, WFC_CHOICES
    from wgqed.scatter import SCATTER_METHODS
    from wgqed.gates import MEASUREMENT_BASES, QUBIT_STATES

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--format', type=str, default=None, choices=FORMAT_CHOICES, help='Output format (default csv).')
    common.add_argument('-o', '--out', type=str, default=None, help='Output filename (default standard output).')
    common.add_argument('--config', type=str, default=None, help='Flat YAML run configuration; flags override its values.')
    common.add_argument('--dump-config', type=str, default=None, help='Write the canonical configuration to this file and exit.')
    common.add_argument('--seedless', action='store_true', help='Assert that the run is deterministic (no random numbers are drawn).')
    common.add_argument('--mp', type=int, default=1, help='Number of multiprocessing processes (sweeps only).')
    common.add_argument('--verbose', action='store_true', help='Be verbose (for debugging purposes).')

    run = argparse.ArgumentParser(add_help=False)
    run.add_argument('--P', type=float, default=None, help='Purcell factor Gamma_1D/Gamma\' (inf for a lossless emitter).')
    run.add_argument('--P-b', type=float, default=None, help='Purcell factor of the second site (remote entanglement).')
    run.add_argument('--gamma-1d', type=float, default=None, help='Waveguide decay rate Gamma_1D.')
    run.add_argument('--delta', type=float, default=None, help='Detuning of the photon from the emitter transition.')
    run.add_argument('--pulse', type=str, default=None, choices=PULSE_CHOICES, help='Pulse family.')
    run.add_argument('--narrowband', action='store_true', help='Shorthand for --pulse narrowband (plane-wave limit).')
    run.add_argument('--gamma-pulse', type=float, default=None, help='Pulse bandwidth (half-exponential rate, 1/sigma for Gaussians).')
    run.add_argument('--sigma', type=float, default=None, help='Gaussian amplitude width (overrides 1/gamma_pulse).')
    run.add_argument('--t0', type=float, default=None, help='Pulse start or center time.')
    run.add_argument('--duration', type=float, default=None, help='Flat-top pulse duration.')
    run.add_argument('--rise', type=float, default=None, help='Flat-top raised-cosine edge time.')
    run.add_argument('--dt', type=float, default=None, help='Grid step override.')
    run.add_argument('--t-end', type=float, default=None, help='Grid end-time override.')
    run.add_argument('--method', type=str, default=None, choices=SCATTER_METHODS, help='Scattering integrator.')
    run.add_argument('--protocol', type=str, default=None, choices=GATE_PROTOCOLS, help='Gate protocol (mirror: unheralded three-level gate).')
    run.add_argument('--wfc', type=str, default=None, choices=WFC_CHOICES, help='Waveform corrector of the polarization gate.')
    run.add_argument('--wfc-k', type=str, default=None, help='Attenuator amplitude, e.g. 0.5 or 0.4+0.1j (default: narrowband f).')
    run.add_argument('--coupling-boost', type=float, default=None, help='Gamma_1D multiplier inside the gate block (2 for a mirror-terminated waveguide).')
    run.add_argument('--bin-separation', type=float, default=None, help='Delay between early and late time bins.')
    run.add_argument('--photon-state', type=str, default=None, choices=tuple(QUBIT_STATES), help='Photonic qubit to store (mirror gate: photon qubit over R, L).')
    run.add_argument('--emitter-state', type=str, default=None, choices=tuple(QUBIT_STATES), help='Atom qubit over s, g of the mirror gate.')
    run.add_argument('--measurement', type=str, default=None, choices=tuple(MEASUREMENT_BASES), help='Measurement basis for memories and remote entanglement.')
    run.add_argument('--dump-envelopes', type=str, default=None, help='Write the incident and scattered envelopes to this CSV file.')

    parser = argparse.ArgumentParser(prog='wgqed', formatter_class=argparse.ArgumentDefaultsHelpFormatter,
                                     description='Waveguide-QED single-photon scattering and heralded gates.')
    subparsers = parser.add_subparsers(dest='command', required=True)
    helps = {'scatter': 'Scatter one photon off a two-level emitter.',
             'gate': 'Evaluate a heralded atom-photon entangling gate.',
             'memory': 'Store a photonic qubit in the emitter and read it back out.',
             'remote': 'Entangle two remote emitters with one photon.'}
    for command in RUN_COMMANDS:
        subparsers.add_parser(command, parents=[common, run], help=helps[command],
                              formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    sweep = subparsers.add_parser('sweep', parents=[common], help='Run a parameter sweep.',
                                  formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    sweep.add_argument('--preset', type=str, default=None, choices=PRESETS, help='Packaged sweep.')
    sweep.add_argument('--spec', type=str, default=None, help='YAML sweep spec.')
    sweep.add_argument('--validate', action='store_true', help='Add flat-top numeric validation to the feasibility table.')

    if log is None:
        from desiutil.log import get_logger
        log = get_logger()

    if options is None:
        args = parser.parse_args()
        log.info(' '.join(sys.argv))
    else:
        args = parser.parse_args(options)
        log.info('wgqed {}'.format(' '.join(options)))

    return args


def build_config(args):
    """Combine ``--config`` (if any) with the command-line overrides.

    Returns:
        :class:`wgqed.io.RunConfig`

    """
    from wgqed.io import RunConfig, read_config

    config = read_config(args.config) if args.config is not None else RunConfig()
    overrides = {}
    for dest, field in FLAG_FIELDS.items():
        value = getattr(args, dest, None)
        if value is not None:
            overrides[field] = value
    if getattr(args, 'narrowband', False):
        overrides['pulse'] = 'narrowband'
    if overrides:
        config = config.replace(**overrides)
    return config


def _write_summary(row, config):
    from wgqed.io import write_rows
    write_rows([row], list(row.keys()), outfile=config.out, fmt=config.format)


def _heralded_protocol(config, log=None):
    if log is None:
        from desiutil.log import get_logger
        log = get_logger()
    if config.protocol not in ('time-bin', 'polarization'):
        errmsg = 'protocol {} has no heralded gate; use time-bin or polarization.'.format(config.protocol)
        log.critical(errmsg)
        raise ConfigError(errmsg)
    return config.protocol


def cmd_scatter(config, log=None):
    """Scatter one photon and report f, T, R, kappa and the oracle deltas."""
    from wgqed.scatter import (closed_form_f_half_exponential, plane_wave_f, scatter,
                               tr_identities)
    from wgqed.io import write_envelopes

    emitter = config.emitter_params()
    packet = config.incident_packet(emitter)
    result = scatter(packet, emitter, method=config.scatter_method, log=log)

    if config.pulse == 'half-exp':
        oracle = closed_form_f_half_exponential(config.gamma_pulse, emitter)
    elif config.pulse == 'narrowband':
        oracle = plane_wave_f(emitter, packet.carrier_detuning + emitter.detuning)
    else:
        oracle = np.nan
    T_id, R_id = tr_identities(result.f, emitter)

    row = {'P': emitter.purcell, 'delta': emitter.detuning, 'pulse': config.pulse,
           'method': config.scatter_method, 'f_re': result.f.real, 'f_im': result.f.imag,
           'T': result.T, 'R': result.R, 'kappa': result.kappa,
           'f_oracle_re': np.real(oracle), 'f_oracle_im': np.imag(oracle),
           'oracle_delta': abs(result.f - oracle),
           'T_identity_delta': result.T - T_id, 'R_identity_delta': result.R - R_id,
           'balance_delta': result.T + result.R + result.kappa - 1.0}
    _write_summary(row, config)
    if config.dump_envelopes is not None:
        write_envelopes(result, config.dump_envelopes)
    return 0


def cmd_gate(config, log=None):
    """Evaluate the heralded gate and report fidelities and the herald breakdown."""
    from wgqed.gates import entangling_gate, qubit_state
    from wgqed.scatter import mirror_gate_three_level

    emitter = config.emitter_params()
    packet = config.incident_packet(emitter)
    if config.protocol == 'mirror':
        _, fidelity, loss = mirror_gate_three_level(
            packet, emitter, qubit_state(config.emitter_state),
            qubit_state(config.photon_state), method=config.scatter_method)
        row = {'protocol': 'mirror', 'P': emitter.purcell, 'atom_state': config.emitter_state,
               'photon_state': config.photon_state, 'fidelity': fidelity, 'loss': loss}
        _write_summary(row, config)
        return 0

    wfc = config.corrector() if config.protocol == 'polarization' else None
    _, report = entangling_gate(config.protocol, packet, emitter, wfc=wfc,
                                coupling_boost=config.coupling_boost,
                                method=config.scatter_method,
                                bin_separation=config.bin_separation)
    row = {'protocol': config.protocol, 'wfc': wfc.name if wfc is not None else 'none',
           'P': emitter.purcell, 'coupling_boost': config.coupling_boost}
    row.update(report.as_row())
    _write_summary(row, config)
    return 0


def cmd_memory(config, log=None):
    """Store then retrieve a photonic qubit and report both steps."""
    from wgqed.memory import memory_round_trip

    _heralded_protocol(config, log=log)
    emitter = config.emitter_params()
    packet = config.incident_packet(emitter)
    wfc = config.corrector() if config.protocol == 'polarization' else None
    stored, retrieved, fidelity = memory_round_trip(
        config.photon_state, packet, emitter, protocol=config.protocol,
        measurement=config.measurement, wfc=wfc, coupling_boost=config.coupling_boost,
        method=config.scatter_method)
    row = {'protocol': config.protocol, 'photon_state': config.photon_state,
           'measurement': config.measurement, 'P': emitter.purcell,
           'store_p_success': stored.p_success, 'store_fidelity': stored.fidelity,
           'retrieve_p_success': retrieved.p_success, 'retrieve_fidelity': retrieved.fidelity,
           'round_trip_fidelity': fidelity}
    _write_summary(row, config)
    return 0


def cmd_remote(config, log=None):
    """Entangle two emitters with one photon and report concurrence and success."""
    from wgqed.memory import remote_entangle

    _heralded_protocol(config, log=log)
    emitter_a = config.emitter_params('a')
    emitter_b = config.emitter_params('b')
    packet = config.incident_packet(emitter_a if emitter_a.gamma <= emitter_b.gamma else emitter_b)
    wfc = config.corrector() if config.protocol == 'polarization' else None
    outcome = remote_entangle(emitter_a, emitter_b, packet, protocol=config.protocol,
                              measurement=config.measurement, wfc=wfc,
                              coupling_boost=config.coupling_boost,
                              method=config.scatter_method)
    row = {'protocol': config.protocol, 'measurement': config.measurement,
           'P_a': emitter_a.purcell, 'P_b': emitter_b.purcell,
           'p_success': outcome.p_success, 'concurrence': outcome.concurrence}
    for ii, prob in enumerate(outcome.outcome_probabilities):
        row['p_outcome_{}'.format(ii)] = prob
    _write_summary(row, config)
    return 0


def cmd_sweep(config, args, log=None):
    """Run a preset or spec-file sweep, streaming rows to the output."""
    from wgqed.io import preset_filename, read_sweep_spec, write_rows, write_table
    from wgqed.sweep import feasibility_table, iter_sweep

    if log is None:
        from desiutil.log import get_logger
        log = get_logger()

    if (args.preset is None) == (args.spec is None):
        errmsg = 'sweep needs exactly one of --preset or --spec.'
        log.critical(errmsg)
        raise ConfigError(errmsg)

    if args.preset == 'feasibility':
        table = feasibility_table(validate=args.validate, mp=args.mp)
        write_table(table, outfile=config.out, fmt=config.format)
        return 0

    specfile = args.spec if args.spec is not None else preset_filename(args.preset)
    spec = read_sweep_spec(specfile)
    write_rows(iter_sweep(spec, mp=args.mp), spec.columns, outfile=config.out, fmt=config.format)
    return 0


COMMANDS = {'scatter': cmd_scatter, 'gate': cmd_gate, 'memory': cmd_memory,
            'remote': cmd_remote}


def main(argv=None):
    """Entry point of the wgqed script.

    Returns:
        int: the process exit code.

    """
    from desiutil.log import get_logger, DEBUG

    try:
        args = parse(options=argv)
    except SystemExit as err:
        return 0 if err.code in (0, None) else 2

    log = get_logger(DEBUG) if args.verbose else get_logger()

    t0 = time.time()
    try:
        config = build_config(args)
        if args.dump_config is not None:
            from wgqed.io import dump_config
            dump_config(config, args.dump_config)
            return 0
        if args.command == 'sweep':
            status = cmd_sweep(config, args, log=log)
        else:
            status = COMMANDS[args.command](config, log=log)
    except (ConfigError, BinOverlapError, StateError) as err:
        log.error('{} failed: {}'.format(args.command, err))
        return 2
    except (GridError, ResolutionError) as err:
        log.error('{} failed: {}'.format(args.command, err))
        return 3
    log.info('wgqed {} took {:.2f} seconds.'.format(args.command, time.time()-t0))
    return status


if __name__ == '__main__':
    sys.exit(main())
