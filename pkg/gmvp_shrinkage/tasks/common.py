# -*- coding: utf-8 -*-

"""
gmvp_shrinkage.tasks.common
~~~~~~~~~~~~~~~~~~~~~~~~~~~

Functions shared by every experiment task: resolving the ExperimentSpec
from packaged defaults, an optional spec file and command-line flags,
staging output files and writing them with the resolved spec embedded.

Copyright (c) 2026 gmvp_shrinkage developers

Permission is hereby granted, free of charge, to any person obtaining a copy
of this software and associated documentation files (the "Software"), to deal
in the Software without restriction, including without limitation the rights
to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
copies of the Software, and to permit persons to whom the Software is
furnished to do so, subject to the following conditions:

    The above copyright notice and this permission notice shall be included in
    all copies or substantial portions of the Software.

    THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
    IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
    FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
    AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
    LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
    OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN
    THE SOFTWARE.
"""

import contextlib
import hashlib
import json
import logging
import os
import shutil
import tempfile

from dataclasses import dataclass, field

import funcy

from gmvp_shrinkage.errors import ValidationError
from gmvp_shrinkage.estimators import SolverOptions
from gmvp_shrinkage.utils.misc import deep_merge, drop_none, parse_cfg_file

logger = logging.getLogger(__name__)

COMMANDS = ('simulate', 'calibrate', 'backtest', 'boottest')
CHECKSUMS_FILE = 'checksums.md5'
DEFAULTS_FILE = os.path.join(os.path.dirname(os.path.dirname(__file__)),
                             'config', 'experiment.tmpl.yaml')


@dataclass(frozen=True)
class ExperimentSpec:
    """A fully resolved experiment: command, parameters, seed and output dir."""

    command: str
    params: dict = field(default_factory=dict)
    seed: int = 0
    threads: int = 1
    out_dir: str = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValidationError('Unknown command', self.command)
        if int(self.seed) != self.seed or not 0 <= self.seed < 2 ** 64:
            raise ValidationError('seed must be a 64-bit unsigned integer', self.seed)
        if int(self.threads) != self.threads or self.threads < 1:
            raise ValidationError('threads must be an integer >= 1', self.threads)

    def solver_options(self):
        try:
            return SolverOptions(**self.params.get('solver', {}))
        except TypeError as err:
            raise ValidationError('Unknown solver option', str(err)) from err

    def as_dict(self):
        return {'command': self.command, 'seed': int(self.seed),
                'threads': int(self.threads), 'params': self.params}

    def header(self):
        """The spec as one canonical JSON string."""
        return json.dumps(self.as_dict(), sort_keys=True)


def resolve_spec(command, spec_file=None, out_dir=None, seed=None, threads=None):
    """Resolves the ExperimentSpec of ``command``.

    Later sources win: packaged defaults, then ``spec_file`` (YAML or JSON,
    either a bare parameter block or one keyed by command), then flags.

    Args:
        command (string): One of simulate, calibrate, backtest, boottest.
        spec_file (string): Optional path to a spec file.
        out_dir (string): Output directory.
        seed (int): Seed override.
        threads (int): Thread count override.

    Requires:
        None

    Returns:
        ExperimentSpec: The resolved, validated spec.

    Example:
        from gmvp_shrinkage.tasks.common import resolve_spec

        spec = resolve_spec('backtest', 'my_backtest.yaml', '/tmp/out', seed=7)
    """
    if command not in COMMANDS:
        raise ValidationError('Unknown command', command)

    params = parse_cfg_file(DEFAULTS_FILE, command)
    if spec_file:
        user_cfg = parse_cfg_file(spec_file)
        if command in user_cfg and isinstance(user_cfg[command], dict):
            user_cfg = user_cfg[command]
        params = deep_merge(params, user_cfg)

    params = deep_merge(params, drop_none({'seed': seed, 'threads': threads}))

    unknown = set(params) - set(parse_cfg_file(DEFAULTS_FILE, command))
    if unknown:
        raise ValidationError('Unknown parameters for %s' % command, sorted(unknown))

    (seed, threads) = (params.pop('seed'), params.pop('threads'))
    return ExperimentSpec(command, params, int(seed), int(threads), out_dir)


def required_path(params, key, label=None):
    """Returns the existing input file ``params[key]`` or raises OSError."""
    path = params.get(key)
    if not path:
        raise ValidationError('Missing input path', label or key)
    if not os.path.exists(path):
        raise OSError(2, 'Input file does not exist', path)

    return path


@contextlib.contextmanager
def staged_outputs(out_dir):
    """Yields a temporary directory whose files move into ``out_dir`` on success.

    On any exception the temporary directory and everything written to it
    are removed and ``out_dir`` is left as it was.
    """
    os.makedirs(out_dir, exist_ok=True)
    tmp_dir = tempfile.mkdtemp(prefix='.staging_', dir=out_dir)

    try:
        yield tmp_dir
    except BaseException:
        shutil.rmtree(tmp_dir, ignore_errors=True)
        raise

    for file_name in sorted(os.listdir(tmp_dir)):
        os.replace(os.path.join(tmp_dir, file_name), os.path.join(out_dir, file_name))
    os.rmdir(tmp_dir)


def spec_comment(spec):
    return '# spec: %s\n' % spec.header()


def write_csv_with_spec(frame, path, spec, float_format='%.12g'):
    """Writes ``frame`` as CSV preceded by a '#' line holding the spec."""
    with open(path, 'w', encoding='utf-8', newline='') as out_fh:
        out_fh.write(spec_comment(spec))
        frame.to_csv(out_fh, index=False, float_format=float_format,
                     lineterminator='\n')

    logger.debug('Wrote %s (%s rows)', path, len(frame))
    return path


def _json_ready(obj):
    if isinstance(obj, float) and obj != obj:
        return None
    if isinstance(obj, dict):
        return funcy.walk_values(_json_ready, obj)
    if isinstance(obj, (list, tuple)):
        return [_json_ready(item) for item in obj]
    return obj


def write_json_with_spec(payload, path, spec):
    """Writes ``payload`` as JSON with the spec under the 'spec' key."""
    document = dict(_json_ready(payload))
    document['spec'] = spec.as_dict()

    with open(path, 'w', encoding='utf-8') as out_fh:
        json.dump(document, out_fh, indent=2, sort_keys=True)
        out_fh.write('\n')

    return path


def generate_md5_checksums(files, output_dir):
    """Writes md5 checksums of ``files`` to checksums.md5 in ``output_dir``.

    Each line is '<md5>  <file name>', the format read by ``md5sum -c``.

    Args:
        files (list): Paths of the files to checksum.
        output_dir (string): Directory receiving the checksum file.

    Requires:
        None

    Returns:
        string: Path to the checksum file.

    Example:
        from gmvp_shrinkage.tasks import common

        common.generate_md5_checksums(['/tmp/out/risk_table.csv'], '/tmp/out')
    """
    lines = []
    for file_path in sorted(files, key=os.path.basename):
        md5 = hashlib.md5()
        with open(file_path, 'rb') as in_fh:
            for chunk in iter(lambda: in_fh.read(1 << 20), b''):
                md5.update(chunk)
        lines.append('%s  %s\n' % (md5.hexdigest(), os.path.basename(file_path)))

    checksums_file = os.path.join(output_dir, CHECKSUMS_FILE)
    with open(checksums_file, 'w', encoding='utf-8') as out_fh:
        out_fh.writelines(lines)

    return checksums_file


def run_task(task, spec):
    """Runs ``task(spec, staging_dir)`` and publishes its files to spec.out_dir.

    Returns:
        list: Final paths of the published files, checksum file last.
    """
    if not spec.out_dir:
        raise ValidationError('An output directory is required')

    with staged_outputs(spec.out_dir) as staging_dir:
        written = task(spec, staging_dir)
        generate_md5_checksums(written, staging_dir)
        names = [os.path.basename(path) for path in written] + [CHECKSUMS_FILE]

    logger.info('%s wrote %s files to %s', spec.command, len(names), spec.out_dir)
    return [os.path.join(spec.out_dir, name) for name in names]
