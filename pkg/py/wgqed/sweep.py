"""
wgqed.sweep
===========

Deterministic parameter sweeps over Purcell factor, pulse bandwidth,
detuning, coupling boost and waveform corrector, and the feasibility table.

Rows follow the lexicographic order of the axes and are evaluated
independently, optionally with a multiprocessing pool.

"""
import itertools
import time
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np
import yaml
from astropy.table import Table

from wgqed.pulse import Gaussian, HalfExponential, PlaneWaveWindow
from wgqed.scatter import EmitterParams, scatter
from wgqed.gates import (WFC_VARIANTS, entangling_gate, narrowband_packet,
                         prepare_packet)
from wgqed.util import ConfigError

from desiutil.log import get_logger
log = get_logger()

AXIS_NAMES = ('P', 'gamma_pulse', 'delta', 'coupling_boost', 'wfc')
METRICS = ('f_re', 'f_im', 'T', 'R', 'kappa', 'p_success_avg', 'p_success_min',
           'process_fidelity', 'failure_rate')
SWEEP_PROTOCOLS = ('scatter', 'time-bin', 'polarization')
PULSE_FAMILIES = ('half-exp', 'gaussian', 'narrowband', 'flat-top')

AXIS_DEFAULTS = {'P': np.inf, 'gamma_pulse': 1.0, 'delta': 0.0,
                 'coupling_boost': 1.0, 'wfc': 'none'}

# flat-top validation pulses
FLAT_TOP_DURATION = 1e3

DEFAULT_CAP = 1000000


def _as_float(name, value):
    if isinstance(value, str) and value.strip().lower() in ('inf', '+inf', '.inf', 'infinity'):
        return np.inf
    try:
        return float(value)
    except (TypeError, ValueError):
        errmsg = 'Axis {} value {!r} is not a number.'.format(name, value)
        log.critical(errmsg)
        raise ConfigError(errmsg)


def _check_axis_value(name, value):
    if name == 'wfc':
        if value not in WFC_VARIANTS:
            errmsg = 'Axis wfc value {!r} not in {}.'.format(value, list(WFC_VARIANTS))
            log.critical(errmsg)
            raise ConfigError(errmsg)
        return str(value)
    value = _as_float(name, value)
    if name in ('P', 'gamma_pulse', 'coupling_boost') and not value > 0.0:
        errmsg = 'Axis {} values must be positive, got {}.'.format(name, value)
        log.critical(errmsg)
        raise ConfigError(errmsg)
    if name != 'P' and not np.isfinite(value):
        errmsg = 'Axis {} values must be finite, got {}.'.format(name, value)
        log.critical(errmsg)
        raise ConfigError(errmsg)
    return value


@dataclass(frozen=True)
class SweepSpec:
    """A validated sweep request.

    Attributes:
        axes (tuple): (name, values) pairs, swept lexicographically in this order.
        protocol (str): 'scatter', 'time-bin' or 'polarization'.
        pulse (str): pulse family.
        outputs (tuple): metric names, reported in this order.
        fixed (dict): values of parameters that are not swept.
        cap (int): maximum number of rows.

    """
    axes: Tuple[Tuple[str, Tuple], ...]
    protocol: str = 'scatter'
    pulse: str = 'half-exp'
    outputs: Tuple[str, ...] = METRICS
    fixed: dict = field(default_factory=dict)
    cap: int = DEFAULT_CAP

    def __post_init__(self):
        axes = []
        for name, values in self.axes:
            if name not in AXIS_NAMES:
                errmsg = 'Unknown sweep axis {!r}; choose from {}.'.format(name, AXIS_NAMES)
                log.critical(errmsg)
                raise ConfigError(errmsg)
            values = tuple(values) if isinstance(values, (list, tuple)) else (values, )
            if len(values) == 0:
                errmsg = 'Sweep axis {} has no values.'.format(name)
                log.critical(errmsg)
                raise ConfigError(errmsg)
            axes.append((name, tuple(_check_axis_value(name, v) for v in values)))
        if len(axes) == 0:
            errmsg = 'Sweep needs at least one axis.'
            log.critical(errmsg)
            raise ConfigError(errmsg)
        if len({name for name, _ in axes}) != len(axes):
            errmsg = 'Sweep axes must be distinct.'
            log.critical(errmsg)
            raise ConfigError(errmsg)
        object.__setattr__(self, 'axes', tuple(axes))

        if self.protocol not in SWEEP_PROTOCOLS:
            errmsg = 'Unknown sweep protocol {!r}; choose from {}.'.format(self.protocol, SWEEP_PROTOCOLS)
            log.critical(errmsg)
            raise ConfigError(errmsg)
        if self.pulse not in PULSE_FAMILIES:
            errmsg = 'Unknown pulse family {!r}; choose from {}.'.format(self.pulse, PULSE_FAMILIES)
            log.critical(errmsg)
            raise ConfigError(errmsg)

        outputs = tuple(self.outputs)
        unknown = [m for m in outputs if m not in METRICS]
        if unknown or len(outputs) == 0:
            errmsg = 'Unknown or missing metric(s) {}; choose from {}.'.format(unknown, METRICS)
            log.critical(errmsg)
            raise ConfigError(errmsg)
        object.__setattr__(self, 'outputs', outputs)

        fixed = dict(AXIS_DEFAULTS)
        for name, value in dict(self.fixed).items():
            if name == 'duration':
                fixed[name] = _as_float(name, value)
                continue
            if name not in AXIS_NAMES:
                errmsg = 'Unknown fixed sweep parameter {!r}.'.format(name)
                log.critical(errmsg)
                raise ConfigError(errmsg)
            fixed[name] = _check_axis_value(name, value)
        object.__setattr__(self, 'fixed', fixed)

        if self.npoints > self.cap:
            errmsg = 'Sweep has {} points, more than the cap of {}.'.format(self.npoints, self.cap)
            log.critical(errmsg)
            raise ConfigError(errmsg)

    @classmethod
    def from_dict(cls, spec):
        """Build from a mapping with keys axes, protocol, pulse, outputs, fixed, cap."""
        spec = dict(spec)
        allowed = {'axes', 'protocol', 'pulse', 'outputs', 'fixed', 'cap'}
        unknown = set(spec) - allowed
        if unknown:
            errmsg = 'Unknown sweep spec key(s) {}.'.format(sorted(unknown))
            log.critical(errmsg)
            raise ConfigError(errmsg)
        axes = spec.get('axes')
        if not isinstance(axes, dict) or len(axes) == 0:
            errmsg = 'Sweep spec needs a non-empty mapping of axes.'
            log.critical(errmsg)
            raise ConfigError(errmsg)
        kwargs = {'axes': tuple(axes.items())}
        for key in ('protocol', 'pulse', 'fixed'):
            if key in spec and spec[key] is not None:
                kwargs[key] = spec[key]
        if 'outputs' in spec and spec['outputs'] is not None:
            outputs = spec['outputs']
            kwargs['outputs'] = tuple(outputs) if isinstance(outputs, (list, tuple)) else (outputs, )
        if 'cap' in spec:
            kwargs['cap'] = int(spec['cap'])
        return cls(**kwargs)

    @property
    def axis_names(self):
        return tuple(name for name, _ in self.axes)

    @property
    def npoints(self):
        return int(np.prod([len(values) for _, values in self.axes]))

    @property
    def columns(self):
        return self.axis_names + self.outputs + ('evaluation', )

    def points(self):
        """Parameter dictionaries in lexicographic axis order."""
        names = self.axis_names
        for combo in itertools.product(*[values for _, values in self.axes]):
            point = dict(self.fixed)
            point.update(zip(names, combo))
            yield point


def _pulse_packet(family, point, emitter):
    """Incident packet, scattering method and evaluation flag for one row."""
    if family == 'narrowband':
        return narrowband_packet(), 'plane_wave', 'analytic'
    if family == 'half-exp':
        shape = HalfExponential(point['gamma_pulse'])
    elif family == 'gaussian':
        shape = Gaussian(1.0 / point['gamma_pulse'])
    else:
        shape = PlaneWaveWindow(point.get('duration', FLAT_TOP_DURATION))
    packet = prepare_packet(shape, emitter, point['coupling_boost'])
    return packet, 'etd_recursive', 'numeric'


def sweep_one(point, protocol, pulse, outputs, columns):
    """Evaluate one sweep row.

    Returns:
        dict mapping column names to values.

    """
    emitter = EmitterParams.from_purcell(point['P'], detuning=point['delta'])
    boost = point['coupling_boost']
    packet, method, evaluation = _pulse_packet(pulse, point, emitter)

    base = scatter(packet, emitter, method=method)
    values = {'f_re': base.f.real, 'f_im': base.f.imag, 'T': base.transmittance,
              'R': base.reflectance, 'kappa': base.loss}

    if protocol == 'scatter':
        block = base if boost == 1.0 else scatter(packet, emitter.boosted(boost), method=method)
        values.update({'p_success_avg': block.reflectance, 'p_success_min': block.reflectance,
                       'failure_rate': block.transmittance, 'process_fidelity': np.nan})
    else:
        wfc = WFC_VARIANTS[point['wfc']]()
        _, report = entangling_gate(protocol, packet, emitter, wfc=wfc,
                                    coupling_boost=boost, method=method)
        values.update({'p_success_avg': report.p_success_avg,
                       'p_success_min': report.p_success_min,
                       'failure_rate': report.failure_rate,
                       'process_fidelity': report.process_fidelity})

    row = {}
    for col in columns:
        if col == 'evaluation':
            row[col] = evaluation
        elif col in values and col in outputs:
            row[col] = float(values[col])
        else:
            row[col] = point[col]
    return row


def _sweep_one(args):
    """Multiprocessing wrapper."""
    return sweep_one(*args)


def iter_sweep(spec, mp=1):
    """Yield sweep rows in order, evaluating them on ``mp`` processes."""
    t0 = time.time()
    args = [(point, spec.protocol, spec.pulse, spec.outputs, spec.columns)
            for point in spec.points()]
    log.info('Sweeping {} point(s) with protocol {} and {} pulses.'.format(
        len(args), spec.protocol, spec.pulse))
    if mp > 1:
        import multiprocessing
        with multiprocessing.Pool(mp) as P:
            for row in P.imap(_sweep_one, args):
                yield row
    else:
        for arg in args:
            yield _sweep_one(arg)
    log.info('Sweep took {:.2f} seconds.'.format(time.time()-t0))


def run_sweep(spec, mp=1):
    """Evaluate every point of ``spec``.

    Args:
        spec (SweepSpec or dict): the sweep request.
        mp (int): number of worker processes.

    Returns:
        :class:`astropy.table.Table` with one row per grid point.

    """
    if not isinstance(spec, SweepSpec):
        spec = SweepSpec.from_dict(spec)
    rows = list(iter_sweep(spec, mp=mp))
    return Table(rows=[[row[col] for col in spec.columns] for row in rows],
                 names=spec.columns)


def read_feasibility_platforms():
    """Platform rows (name, Purcell factor, quoted claim) from the package data."""
    from importlib import resources
    infofile = resources.files('wgqed').joinpath('data/feasibility.yaml')
    with open(infofile, 'r') as F:
        info = yaml.safe_load(F)
    return info


def feasibility_p_success(purcell, coupling_boost=1.0):
    """Narrowband heralding probability (bP/(bP + 1))^2 at resonance."""
    eff = coupling_boost * purcell
    return (eff / (eff + 1.0))**2


def feasibility_table(validate=False, mp=1):
    """Success probabilities of the two reference platforms under both boost conventions.

    Args:
        validate (bool): also evaluate each row numerically with a long
            flat-top pulse (column ``p_success_numeric``).

    Returns:
        :class:`astropy.table.Table`

    """
    info = read_feasibility_platforms()
    boosts = info.get('coupling_boost', [1, 2])
    names, purcell, boost, psucc, claims, met = [], [], [], [], [], []
    for platform in info['platforms']:
        for b in boosts:
            p_s = feasibility_p_success(float(platform['P']), float(b))
            bound = float(platform['claim_bound'])
            ok = p_s > bound if platform['claim_sense'] == 'above' else p_s <= bound
            names.append(platform['name'])
            purcell.append(float(platform['P']))
            boost.append(float(b))
            psucc.append(p_s)
            claims.append(platform['claim'])
            met.append(bool(ok))

    out = Table()
    out['platform'] = names
    out['P'] = purcell
    out['coupling_boost'] = boost
    out['p_success'] = psucc
    out['claim'] = claims
    out['claim_met'] = met

    if validate:
        spec = SweepSpec(axes=(('P', tuple(sorted(set(purcell), reverse=True))),
                               ('coupling_boost', tuple(float(b) for b in boosts))),
                         protocol='scatter', pulse='flat-top', outputs=('p_success_avg', ),
                         fixed={'duration': info.get('validation_duration', FLAT_TOP_DURATION)})
        numeric = {(row['P'], row['coupling_boost']): row['p_success_avg']
                   for row in iter_sweep(spec, mp=mp)}
        out['p_success_numeric'] = [numeric[(p, b)] for p, b in zip(purcell, boost)]

    for row in out:
        if not row['claim_met']:
            log.info('{} (P={:g}) with coupling_boost={:g}: p_s={:.4f} does not reproduce "{}".'.format(
                row['platform'], row['P'], row['coupling_boost'], row['p_success'], row['claim']))
    return out
