"""
wgqed.io
========

Run configuration (strict flat YAML files plus command-line overrides),
sweep-spec and preset readers, and the CSV/JSON table and envelope writers.

"""
import os
import sys
import csv
import contextlib
import json
import time
import dataclasses
from dataclasses import dataclass
from typing import Optional

import numpy as np
import yaml

from wgqed.util import ConfigError
from wgqed.pulse import Gaussian, HalfExponential, PlaneWaveWindow, TimeGrid, default_grid
from wgqed.scatter import SCATTER_METHODS, EmitterParams
from wgqed.gates import (PROTOCOLS, QUBIT_STATES, MEASUREMENT_BASES, Attenuator,
                         NoCorrector, SecondScatterer, narrowband_packet,
                         prepare_packet)

from desiutil.log import get_logger
log = get_logger()

PULSE_CHOICES = ('half-exp', 'gaussian', 'flat-top', 'narrowband')
WFC_CHOICES = ('none', 'attenuator', 'second-scatterer')
FORMAT_CHOICES = ('csv', 'json')
PRESETS = ('feasibility', 'f-vs-gamma')
# the unheralded three-level mirror gate is available to the gate command only
GATE_PROTOCOLS = PROTOCOLS + ('mirror', )

# flat-top duration when none is given, in units of 1/Gamma_1D
DEFAULT_FLAT_TOP_DURATION = 1e3

FLOAT_FORMAT = '%.12g'

# command-line spelling of each field, for diagnostics
FIELD_FLAGS = {'purcell': '--P', 'purcell_b': '--P-b', 'gamma_pulse': '--gamma-pulse',
               'gamma_1d': '--gamma-1d', 'coupling_boost': '--coupling-boost',
               'wfc_k': '--wfc-k', 'bin_separation': '--bin-separation',
               'photon_state': '--photon-state', 'emitter_state': '--emitter-state',
               'dump_envelopes': '--dump-envelopes', 't_end': '--t-end'}


def _fail(errmsg, field=None, lines=None):
    if field is not None:
        flag = FIELD_FLAGS.get(field, '--{}'.format(field.replace('_', '-')))
        errmsg = '{} ({}): {}'.format(field, flag, errmsg)
        if lines and field in lines:
            errmsg = 'line {}: {}'.format(lines[field], errmsg)
    log.critical(errmsg)
    raise ConfigError(errmsg)


def _to_float(value, field, lines=None, optional=False):
    if value is None and optional:
        return None
    if isinstance(value, bool):
        _fail('expected a number, got {!r}.'.format(value), field, lines)
    if isinstance(value, str) and value.strip().lower() in ('inf', '+inf', '.inf', 'infinity'):
        return np.inf
    try:
        return float(value)
    except (TypeError, ValueError):
        _fail('expected a number, got {!r}.'.format(value), field, lines)


def _to_complex(value, field, lines=None):
    if value is None:
        return None
    if isinstance(value, bool):
        _fail('expected a complex number, got {!r}.'.format(value), field, lines)
    try:
        return complex(value.replace(' ', '') if isinstance(value, str) else value)
    except (TypeError, ValueError):
        _fail('expected a complex number such as 0.5+0.2j, got {!r}.'.format(value), field, lines)


def _to_str(value, field, lines=None, optional=False):
    if value is None and optional:
        return None
    if isinstance(value, (str, int)) and not isinstance(value, bool):
        return str(value)
    _fail('expected a string, got {!r}.'.format(value), field, lines)


@dataclass(frozen=True)
class RunConfig:
    """Everything needed to reproduce one scatter, gate, memory or remote run.

    Rates are in units of Gamma_1D unless ``gamma_1d`` is changed. ``None``
    means "use the default derived from the other fields".

    """
    gamma_1d: float = 1.0
    purcell: float = np.inf
    delta: float = 0.0
    pulse: str = 'half-exp'
    gamma_pulse: float = 1.0
    sigma: Optional[float] = None
    t0: float = 0.0
    duration: Optional[float] = None
    rise: Optional[float] = None
    dt: Optional[float] = None
    t_end: Optional[float] = None
    method: str = 'etd_recursive'
    protocol: str = 'time-bin'
    wfc: str = 'second-scatterer'
    wfc_k: Optional[complex] = None
    coupling_boost: float = 1.0
    bin_separation: Optional[float] = None
    photon_state: str = '+'
    emitter_state: str = '+'
    measurement: str = 'x'
    purcell_b: Optional[float] = None
    format: str = 'csv'
    out: Optional[str] = None
    dump_envelopes: Optional[str] = None

    def validate(self, lines=None):
        """Raise :class:`ConfigError` naming the first offending field."""
        for field in ('gamma_1d', 'gamma_pulse', 'coupling_boost'):
            value = getattr(self, field)
            if not (value > 0.0 and np.isfinite(value)):
                _fail('must be positive and finite, got {}.'.format(value), field, lines)
        for field in ('purcell', 'purcell_b'):
            value = getattr(self, field)
            if value is not None and not value > 0.0:
                _fail('Purcell factor must be positive (inf allowed), got {}.'.format(value), field, lines)
        for field in ('sigma', 'duration', 'dt', 'bin_separation'):
            value = getattr(self, field)
            if value is not None and not (value > 0.0 and np.isfinite(value)):
                _fail('must be positive and finite, got {}.'.format(value), field, lines)
        if self.rise is not None and not (self.rise > 0.0 and np.isfinite(self.rise)):
            _fail('must be positive, got {}.'.format(self.rise), 'rise', lines)
        if self.rise is not None:
            duration = self.duration if self.duration is not None else DEFAULT_FLAT_TOP_DURATION
            if self.rise > 0.5 * duration:
                _fail('flat-top edges cannot exceed half the duration {}, got {}.'.format(
                    duration, self.rise), 'rise', lines)
        for field in ('delta', 't0'):
            if not np.isfinite(getattr(self, field)):
                _fail('must be finite.', field, lines)
        if self.t_end is not None and not np.isfinite(self.t_end):
            _fail('must be finite.', 't_end', lines)

        choices = {'pulse': PULSE_CHOICES, 'method': SCATTER_METHODS, 'protocol': GATE_PROTOCOLS,
                   'wfc': WFC_CHOICES, 'photon_state': tuple(QUBIT_STATES),
                   'emitter_state': tuple(QUBIT_STATES),
                   'measurement': tuple(MEASUREMENT_BASES), 'format': FORMAT_CHOICES}
        for field, allowed in choices.items():
            if getattr(self, field) not in allowed:
                _fail('{!r} not in {}.'.format(getattr(self, field), list(allowed)), field, lines)
        if self.wfc_k is not None and abs(self.wfc_k) > 1.0:
            _fail('attenuator amplitude must satisfy |k| <= 1, got {}.'.format(self.wfc_k), 'wfc_k', lines)
        return self

    def replace(self, **overrides):
        """Copy with ``overrides`` applied (flags win over file values) and validated."""
        return coerce_config(dataclasses.asdict(self) | overrides)

    # builders for the library objects

    def emitter_params(self, site='a'):
        purcell = self.purcell_b if site == 'b' and self.purcell_b is not None else self.purcell
        return EmitterParams.from_purcell(purcell, gamma_1d=self.gamma_1d, detuning=self.delta)

    def pulse_shape(self):
        """Pulse shape instance, or None for the narrowband (plane-wave) limit."""
        if self.pulse == 'half-exp':
            return HalfExponential(self.gamma_pulse, t0=self.t0)
        elif self.pulse == 'gaussian':
            sigma = self.sigma if self.sigma is not None else 1.0 / self.gamma_pulse
            return Gaussian(sigma, t0=self.t0)
        elif self.pulse == 'flat-top':
            duration = self.duration if self.duration is not None else DEFAULT_FLAT_TOP_DURATION
            return PlaneWaveWindow(duration, t0=self.t0, rise=self.rise)
        return None

    @property
    def scatter_method(self):
        return 'plane_wave' if self.pulse == 'narrowband' else self.method

    def incident_packet(self, emitter=None):
        """Normalized incident packet on the default grid, or on the overridden one."""
        if self.pulse == 'narrowband':
            return narrowband_packet()
        emitter = emitter or self.emitter_params()
        shape = self.pulse_shape()
        grid = None
        if self.dt is not None or self.t_end is not None:
            gamma_total = min(emitter.gamma, emitter.boosted(self.coupling_boost).gamma)
            base = default_grid(shape, gamma_total)
            grid = TimeGrid.spanning(base.t_start,
                                     base.t_end if self.t_end is None else self.t_end,
                                     base.dt if self.dt is None else self.dt)
        return prepare_packet(shape, emitter, self.coupling_boost, grid=grid)

    def corrector(self):
        if self.wfc == 'none':
            return NoCorrector()
        elif self.wfc == 'attenuator':
            return Attenuator(k=self.wfc_k)
        return SecondScatterer()


_FLOAT_FIELDS = ('gamma_1d', 'purcell', 'delta', 'gamma_pulse', 't0', 'coupling_boost')
_OPTIONAL_FLOAT_FIELDS = ('sigma', 'duration', 'rise', 'dt', 't_end', 'bin_separation', 'purcell_b')
_STR_FIELDS = ('pulse', 'method', 'protocol', 'wfc', 'photon_state', 'emitter_state',
               'measurement', 'format')
_OPTIONAL_STR_FIELDS = ('out', 'dump_envelopes')

CONFIG_FIELDS = tuple(f.name for f in dataclasses.fields(RunConfig))


def coerce_config(values, lines=None):
    """Build a validated :class:`RunConfig` from a flat mapping.

    Args:
        values (dict): field name -> value (strings, numbers or None).
        lines (dict, optional): field name -> line number, for diagnostics.

    Raises:
        ConfigError: for unknown keys, wrong types or invalid values.

    """
    unknown = sorted(set(values) - set(CONFIG_FIELDS))
    if unknown:
        where = ''
        if lines and unknown[0] in lines:
            where = 'line {}: '.format(lines[unknown[0]])
        errmsg = '{}unknown configuration key(s) {}; allowed keys are {}.'.format(
            where, unknown, list(CONFIG_FIELDS))
        log.critical(errmsg)
        raise ConfigError(errmsg)

    kwargs = {}
    for field, value in values.items():
        if field in _FLOAT_FIELDS:
            if value is None:
                _fail('may not be null.', field, lines)
            kwargs[field] = _to_float(value, field, lines)
        elif field in _OPTIONAL_FLOAT_FIELDS:
            kwargs[field] = _to_float(value, field, lines, optional=True)
        elif field in _STR_FIELDS:
            if value is None:
                _fail('may not be null.', field, lines)
            kwargs[field] = _to_str(value, field, lines)
        elif field in _OPTIONAL_STR_FIELDS:
            kwargs[field] = _to_str(value, field, lines, optional=True)
        else:
            kwargs[field] = _to_complex(value, field, lines)
    return RunConfig(**kwargs).validate(lines)


def _compose_mapping(text, filename):
    """Top-level YAML mapping node of ``text``, with YAML errors turned into ConfigError."""
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
        yaml.safe_load(text)
    except yaml.YAMLError as err:
        mark = getattr(err, 'problem_mark', None)
        where = ' line {}'.format(mark.line + 1) if mark is not None else ''
        errmsg = '{}{}: malformed YAML ({}).'.format(filename, where, getattr(err, 'problem', err))
        log.critical(errmsg)
        raise ConfigError(errmsg)
    if node is None:
        return None
    if not isinstance(node, yaml.MappingNode):
        errmsg = '{} line {}: expected a mapping of key: value pairs.'.format(
            filename, node.start_mark.line + 1)
        log.critical(errmsg)
        raise ConfigError(errmsg)
    return node


def read_config(configfile):
    """Read a flat YAML run configuration.

    Every value must be a scalar; keys are checked against
    :class:`RunConfig`'s fields and every error names the offending line.

    Returns:
        :class:`RunConfig`

    """
    with open(configfile, 'r') as F:
        text = F.read()
    node = _compose_mapping(text, configfile)
    if node is None:
        return RunConfig()

    lines = {}
    for knode, vnode in node.value:
        key = knode.value
        if key in lines:
            errmsg = '{} line {}: duplicate key {!r}.'.format(configfile, knode.start_mark.line + 1, key)
            log.critical(errmsg)
            raise ConfigError(errmsg)
        lines[key] = knode.start_mark.line + 1
        if not isinstance(vnode, yaml.ScalarNode):
            errmsg = '{} line {}: {} must be a single value, not a nested structure.'.format(
                configfile, lines[key], key)
            log.critical(errmsg)
            raise ConfigError(errmsg)

    values = yaml.safe_load(text)
    try:
        return coerce_config(values, lines)
    except ConfigError as err:
        raise ConfigError('{}: {}'.format(configfile, err)) from None


def dump_config(config, outfile=None):
    """Canonical YAML of ``config``: sorted keys, every field present.

    Returns:
        the YAML text; also written to ``outfile`` when given.

    """
    values = dataclasses.asdict(config)
    if values['wfc_k'] is not None:
        values['wfc_k'] = str(values['wfc_k'])
    text = yaml.safe_dump(values, sort_keys=True, default_flow_style=False)
    if outfile is not None:
        with open(outfile, 'w') as F:
            F.write(text)
        log.info('Wrote configuration to {}'.format(outfile))
    return text


def read_sweep_spec(specfile):
    """Read a YAML sweep spec (axes, protocol, pulse, outputs, fixed, cap).

    Returns:
        :class:`wgqed.sweep.SweepSpec`

    """
    from wgqed.sweep import SweepSpec

    with open(specfile, 'r') as F:
        text = F.read()
    node = _compose_mapping(text, specfile)
    if node is None:
        errmsg = '{}: empty sweep spec.'.format(specfile)
        log.critical(errmsg)
        raise ConfigError(errmsg)

    for knode, vnode in node.value:
        line = knode.start_mark.line + 1
        if knode.value == 'axes':
            if not isinstance(vnode, yaml.MappingNode):
                errmsg = '{} line {}: axes must map axis names to value lists.'.format(specfile, line)
                log.critical(errmsg)
                raise ConfigError(errmsg)
            for anode, lnode in vnode.value:
                aline = anode.start_mark.line + 1
                if isinstance(lnode, yaml.SequenceNode) and len(lnode.value) == 0:
                    errmsg = '{} line {}: axis {} has no values.'.format(specfile, aline, anode.value)
                    log.critical(errmsg)
                    raise ConfigError(errmsg)
                if isinstance(lnode, yaml.MappingNode):
                    errmsg = '{} line {}: axis {} must be a list of values.'.format(
                        specfile, aline, anode.value)
                    log.critical(errmsg)
                    raise ConfigError(errmsg)

    try:
        return SweepSpec.from_dict(yaml.safe_load(text))
    except ConfigError as err:
        raise ConfigError('{}: {}'.format(specfile, err)) from None


def preset_filename(name):
    """Path of a packaged preset under wgqed/data."""
    from importlib import resources
    if name not in PRESETS:
        errmsg = 'Unknown preset {!r}; choose from {}.'.format(name, PRESETS)
        log.critical(errmsg)
        raise ConfigError(errmsg)
    return str(resources.files('wgqed').joinpath('data/{}.yaml'.format(name)))


def format_value(value):
    """Text form of a table cell: 12 significant digits for floats."""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (float, np.floating)):
        return FLOAT_FORMAT % value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def _json_value(value):
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if np.isnan(value):
            return None
        if np.isinf(value):
            return 'inf' if value > 0 else '-inf'
        return float(FLOAT_FORMAT % value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    return str(value)


def write_rows(rows, columns, outfile=None, fmt='csv'):
    """Stream ``rows`` (dicts) to ``outfile`` (stdout when None) as CSV or JSON.

    CSV has a header row, comma separators and LF line endings; JSON is an
    array of row objects with NaN written as null and infinities as strings.
    Files are written to a temporary name and renamed when complete.

    Returns:
        number of rows written.

    """
    if fmt not in FORMAT_CHOICES:
        errmsg = 'Unknown output format {!r}; choose from {}.'.format(fmt, FORMAT_CHOICES)
        log.critical(errmsg)
        raise ConfigError(errmsg)

    t0 = time.time()
    if outfile is not None:
        outdir = os.path.dirname(os.path.abspath(outfile))
        if not os.path.isdir(outdir):
            os.makedirs(outdir, exist_ok=True)
        tmpfile = outfile + '.tmp'
        stream = open(tmpfile, 'w', newline='')
    else:
        stream = contextlib.nullcontext(sys.stdout)

    nrow = 0
    with stream as F:
        if fmt == 'csv':
            writer = csv.writer(F, lineterminator='\n')
            writer.writerow(columns)
            for row in rows:
                writer.writerow([format_value(row[col]) for col in columns])
                nrow += 1
        else:
            F.write('[')
            for row in rows:
                obj = {col: _json_value(row[col]) for col in columns}
                F.write(('\n' if nrow == 0 else ',\n') + json.dumps(obj))
                nrow += 1
            F.write('\n]\n')

    if outfile is not None:
        os.rename(tmpfile, outfile)
        log.info('Wrote {} row(s) to {} in {:.2f} seconds.'.format(nrow, outfile, time.time()-t0))
    return nrow


def write_table(table, outfile=None, fmt='csv'):
    """Write an :class:`astropy.table.Table` with :func:`write_rows`."""
    columns = list(table.colnames)
    rows = ({col: row[col] for col in columns} for row in table)
    return write_rows(rows, columns, outfile=outfile, fmt=fmt)


ENVELOPE_COLUMNS = ('tau', 'psi_re', 'psi_im', 'phi_t_re', 'phi_t_im', 'phi_r_re', 'phi_r_im')


def write_envelopes(result, outfile):
    """Dump the incident, transmitted and reflected envelopes of a scatter run as CSV."""
    times = result.incident.grid.times
    psi = result.incident.amplitudes
    phi_t = result.transmitted.amplitudes
    phi_r = result.reflected.amplitudes
    rows = ({'tau': times[i], 'psi_re': psi[i].real, 'psi_im': psi[i].imag,
             'phi_t_re': phi_t[i].real, 'phi_t_im': phi_t[i].imag,
             'phi_r_re': phi_r[i].real, 'phi_r_im': phi_r[i].imag}
            for i in range(len(times)))
    return write_rows(rows, ENVELOPE_COLUMNS, outfile=outfile, fmt='csv')
