import os

import numpy as np
import pytest
import torch

from weightlab._version import __version__
from weightlab.cli import suite
from weightlab.cli.cli import main
from weightlab.cli.plot import emit_plot
from weightlab.core.utils import DTYPE, DomainError, PropertyCheckError
from weightlab.kernels.membership import CERTIFIED
from weightlab.lattice.domain import Grid1D, MixedSpace
from weightlab.lattice.functions import GridFunction
from weightlab.lattice.io import read_grid_function, write_grid_function
from weightlab.sbound import WEIGHTED_COMPOSITION, OperatorFamily, write_family

CONFIG = os.path.join(
    os.path.dirname(os.path.dirname(__file__)), 'configs', 'heat_family.json'
)


def grid_csv(tmp_path, name, values):
    file_name = str(tmp_path / name)
    f = GridFunction(Grid1D(0.0, 1.0, len(values)), values)
    write_grid_function(f, file_name)
    return file_name


def read_text(path):
    with open(path) as fp:
        return fp.read()


def test_version(capsys):
    assert main(['--version']) == 0
    assert __version__ in capsys.readouterr().out


def test_usage_errors():
    assert main([]) == 2
    assert main(['ap', '--p', '2']) == 2
    assert main(['lsbound', '--family', 'f.csv', '--axes', '0', '--s', '2']) == 2
    assert main(['nonexistent']) == 2


def test_ap(tmp_path):
    weight = grid_csv(tmp_path, 'w.csv', [1.0, 1.0, 1.0, 1.0])
    out = str(tmp_path / 'ap.csv')
    assert main(['ap', '--weight', weight, '--p', '2', '--dual', '--out', out]) == 0
    content = read_text(out)
    assert 'weight,p,constant,first,last\n' in content
    assert '\ndual,' in content
    assert main(['ap', '--weight', str(tmp_path / 'missing.csv'), '--p', '2']) == 2


def test_threads_variable(tmp_path, monkeypatch):
    weight = grid_csv(tmp_path, 'w.csv', [1.0, 2.0])
    monkeypatch.setenv('WEIGHTLAB_THREADS', '0')
    assert main(['ap', '--weight', weight, '--p', '2']) == 2


def test_maximal(tmp_path):
    f = grid_csv(tmp_path, 'f.csv', [0.0, 4.0, 0.0, 0.0])
    out = str(tmp_path / 'mf.csv')
    assert main(['maximal', '--f', f, '--out', out]) == 0
    Mf = read_grid_function(out)
    np.testing.assert_allclose(Mf.values, [2.0, 4.0, 2.0, 4.0 / 3.0], rtol=1e-12)
    assert main(['maximal', '--fiber-csv', f]) == 2


def test_kernel_check(tmp_path):
    out = str(tmp_path / 'verdict.csv')
    kernel = str(tmp_path / 'box.csv')
    args = ['kernel-check', '--name', 'box', '--m', '2', '--n', '16']
    assert main(args + ['--out', out, '--kernel-out', kernel]) == 0
    assert CERTIFIED in read_text(out)
    assert main(['kernel-check', '--kernel-csv', kernel, '--n', '16']) == 0
    (tmp_path / 'bad.csv').write_text('offset,value\n0,1.0\n1,1.0\n')
    assert main(['kernel-check', '--kernel-csv', str(tmp_path / 'bad.csv')]) == 2


def test_lsbound(tmp_path):
    swap = torch.tensor([[0.0, 1.0], [1.0, 0.0]], dtype=DTYPE)
    family = OperatorFamily(
        torch.stack([torch.eye(2, dtype=DTYPE), swap]),
        MixedSpace.counting([2], [2.0]),
        structure=WEIGHTED_COMPOSITION,
    )
    family_file = str(tmp_path / 'family.csv')
    write_family(family, family_file)
    out = str(tmp_path / 'bounds.csv')
    witness = str(tmp_path / 'witness.csv')
    plot = str(tmp_path / 'lower.svg')
    args = [
        'lsbound',
        '--family',
        family_file,
        '--axes',
        '2',
        '--structure',
        WEIGHTED_COMPOSITION,
        '--s',
        '1,2,inf',
        '--n-max',
        '3',
        '--budget',
        '4',
        '--out',
        out,
        '--witness',
        witness,
        '--plot',
        plot,
    ]
    assert main(args) == 0
    content = read_text(out)
    assert 's,lower,upper,certificate_kind\n' in content
    assert 'closed_form' in content
    assert read_text(witness).count('\n') > 3
    assert read_text(plot).startswith('<?xml')
    assert main(args[:3] + ['--axes', '2', '--q', '2,3', '--s', '2']) == 2


def test_extrapolate(tmp_path):
    out = str(tmp_path / 'extrapolate.csv')
    args = [
        'extrapolate',
        '--p0',
        '2',
        '--p',
        '3',
        '--pairs',
        'identity',
        '--weights',
        'power:0,0.3',
        '--cells',
        '24',
        '--samples',
        '6',
        '--out',
        out,
    ]
    assert main(args) == 0
    assert '# verdict=pass\n' in read_text(out)
    assert main(args[:5] + ['--weights', 'power:0']) == 2


def test_intop(tmp_path):
    assert main(['intop', '--config', CONFIG, '--dry']) == 0
    assert main(['intop', '--config', str(tmp_path / 'missing.json')]) == 2
    (tmp_path / 'broken.json').write_text('[{"id": "x", ')
    assert main(['intop', '--config', str(tmp_path / 'broken.json')]) == 2


def test_duality(tmp_path):
    out = str(tmp_path / 'duality.csv')
    args = ['duality', '--axes', '3,2', '--q', '3,1.5', '--trials', '50']
    assert main(args + ['--N', '2', '--out', out]) == 0
    content = read_text(out)
    assert 'dual_norm,' in content
    assert 'tuple_worst_slack,' in content
    assert main(['duality', '--axes', '3', '--q', '1']) == 2


def test_suite_single_criterion(tmp_path):
    out = str(tmp_path / 'suite.csv')
    assert main(['suite', '--only', 'maximal-oracle', '--out', out]) == 0
    content = read_text(out)
    assert 'maximal-oracle,pass,' in content
    assert '# criteria=1\n' in content


def test_suite_failure_exit_code(monkeypatch):
    def broken(size, seed):
        raise PropertyCheckError('broken', 'always fails')

    monkeypatch.setattr(suite, 'CRITERIA', [('broken', broken)])
    assert main(['suite', '--only', 'broken']) == 1


def test_plot_is_byte_stable(tmp_path):
    series = {'a': [(1.0, 2.0), (2.0, 3.5)], 'b': [(1.0, 1.0), (3.0, 0.5)]}
    first = emit_plot(series, str(tmp_path / 'first.svg'))
    second = emit_plot(series, str(tmp_path / 'second.svg'))
    assert read_text(first) == read_text(second)
    with pytest.raises(DomainError):
        emit_plot([], str(tmp_path / 'empty.svg'))


def test_unwritable_output(tmp_path):
    weight = grid_csv(tmp_path, 'w.csv', [1.0, 2.0])
    out = str(tmp_path / 'missing' / 'ap.csv')
    assert main(['ap', '--weight', weight, '--p', '2', '--out', out]) == 2
    assert main(['maximal', '--f', weight, '--out', out]) == 2


def test_suite_rerun_is_byte_identical(tmp_path, monkeypatch):
    outputs = []
    for threads in ('1', '4'):
        monkeypatch.setenv('WEIGHTLAB_THREADS', threads)
        outputs.append(str(tmp_path / f'suite-{threads}.csv'))
        args = ['suite', '--only', 'maximal-oracle', '--only', 'ls-sandwich']
        assert main(args + ['--seed', '7', '--out', outputs[-1]]) == 0
    with open(outputs[0], 'rb') as first, open(outputs[1], 'rb') as second:
        assert first.read() == second.read()


def test_determinism_criterion(tmp_path, monkeypatch):
    calls = []

    def counted(size, seed):
        calls.append(torch.get_num_threads())
        return f'seed {seed}'

    monkeypatch.delenv('WEIGHTLAB_THREADS', raising=False)
    monkeypatch.setattr(
        suite,
        'CRITERIA',
        [('counted', counted), ('determinism', suite.determinism)],
    )
    out = str(tmp_path / 'suite.csv')
    assert main(['suite', '--only', 'determinism', '--seed', '7', '--out', out]) == 0
    assert len(calls) == 2 and calls[0] == 1
    assert 'determinism,pass,' in read_text(out)
    assert 'WEIGHTLAB_THREADS' not in os.environ
