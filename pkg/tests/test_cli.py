#!/usr/bin/env python

"""Tests for `fusetrack` package."""

import io
import json
import logging
import os

import pandas as pd
import pytest

from fusetrack import cli
from fusetrack.config import load_yaml
from fusetrack.records.jsonl import read_jsonl, write_jsonl
from fusetrack.tracker.types import FusedList, SensorFrame
from fusetrack.truth_eval.ground_truth import RelativeState


@pytest.fixture(autouse=True)
def reset_logging():
    """Remove the handler installed by the command line entry point.

    See more at: http://doc.pytest.org/en/latest/fixture.html
    """
    yield
    logger = logging.getLogger('fusetrack')
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
    logger.setLevel(logging.NOTSET)


@pytest.fixture(scope='module')
def run_dir(tmpdir_factory):
    """Simulated highway logs with their truth and fused output.

    See more at: http://doc.pytest.org/en/latest/fixture.html
    """
    out = tmpdir_factory.mktemp('run')
    path = str(out)
    assert cli.main([
        'simulate', '--scenario', 'highway', '--duration', '5',
        '--seed', '2', '--out', path]) == 0
    assert cli.main([
        'gt', '--rtk', os.path.join(path, 'rtk.jsonl'),
        '--ego', os.path.join(path, 'ego.jsonl'),
        '--out', os.path.join(path, 'gt.jsonl')]) == 0
    assert cli.main([
        'fuse', '--sensors', os.path.join(path, 'sensor.jsonl'),
        '--ego', os.path.join(path, 'ego.jsonl'),
        '--out', os.path.join(path, 'tracks.jsonl')]) == 0
    logger = logging.getLogger('fusetrack')
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
    return path


def test_simulate_writes_logs(run_dir):
    """Tests the files written by the simulate command."""
    assert sorted(os.listdir(run_dir)) == [
        'ego.jsonl', 'gt.jsonl', 'rtk.jsonl', 'scenario.yaml',
        'sensor.jsonl', 'tracks.jsonl', 'truth.jsonl']
    scenario = load_yaml(os.path.join(run_dir, 'scenario.yaml'))
    assert scenario['duration'] == 5.0
    assert scenario['seed'] == 2


def test_fuse_one_list_per_frame(run_dir):
    """Tests 125 Lidar and 75 Radar frames fused into 200 lists."""
    tracks = read_jsonl(os.path.join(run_dir, 'tracks.jsonl'), FusedList)
    assert len(tracks) == 200


def test_gt_matches_simulated_truth(run_dir):
    """Tests that the computed truth lines up with the simulated one."""
    truth = read_jsonl(os.path.join(run_dir, 'gt.jsonl'), RelativeState)
    simulated = read_jsonl(os.path.join(run_dir, 'truth.jsonl'))
    assert [s.t for s in truth] == [s.t for s in simulated]


def test_eval_report(run_dir, capsys):
    """Tests the CSV report of the end-to-end pipeline."""
    code = cli.main([
        'eval', '--tracks', os.path.join(run_dir, 'tracks.jsonl'),
        '--truth', os.path.join(run_dir, 'gt.jsonl'),
        '--sensors', os.path.join(run_dir, 'sensor.jsonl'),
        '--ego', os.path.join(run_dir, 'ego.jsonl')])
    assert code == 0
    frame = pd.read_csv(io.StringIO(capsys.readouterr().out))
    assert len(frame) == 12
    assert list(frame['source'].unique()) == ['Radar', 'Lidar', 'Fusion']
    assert frame['mse'].notna().all()


def test_eval_json_file(run_dir, tmpdir):
    """Tests the JSON report written to a file."""
    out = str(tmpdir.join('report.json'))
    code = cli.main([
        'eval', '--tracks', os.path.join(run_dir, 'tracks.jsonl'),
        '--truth', os.path.join(run_dir, 'truth.jsonl'),
        '--report', 'json', '--out', out])
    assert code == 0
    with open(out) as f:
        rows = json.load(f)
    assert [row['source'] for row in rows] == ['Fusion'] * 4


def test_calibrate_then_fuse(run_dir, tmpdir):
    """Tests that calibrated noise feeds back into the tracker."""
    noise = str(tmpdir.join('noise.yaml'))
    assert cli.main([
        'calibrate', '--sensors', os.path.join(run_dir, 'sensor.jsonl'),
        '--truth', os.path.join(run_dir, 'truth.jsonl'),
        '--ego', os.path.join(run_dir, 'ego.jsonl'),
        '--out', noise]) == 0
    data = load_yaml(noise)
    assert sorted(data['noise']) == ['Lidar', 'Radar']
    out = str(tmpdir.join('tracks.jsonl'))
    assert cli.main([
        'fuse', '--sensors', os.path.join(run_dir, 'sensor.jsonl'),
        '--ego', os.path.join(run_dir, 'ego.jsonl'),
        '--config', noise, '--coast', '1', '--out', out]) == 0
    assert len(read_jsonl(out)) == 200


def test_fuse_empty_log(tmpdir):
    """Tests that an empty sensor log gives an empty output."""
    sensors = tmpdir.join('sensor.jsonl')
    sensors.write('')
    out = tmpdir.join('tracks.jsonl')
    assert cli.main(
        ['fuse', '--sensors', str(sensors), '--out', str(out)]) == 0
    assert out.read() == ''


def test_eval_without_overlap(tmpdir, capsys):
    """Tests the data error exit code when the MSE is undefined."""
    tracks = str(tmpdir.join('tracks.jsonl'))
    truth = str(tmpdir.join('truth.jsonl'))
    write_jsonl([FusedList.empty(0.0)], tracks)
    write_jsonl([RelativeState(100.0, 30, 0, 0, 0),
                 RelativeState(101.0, 30, 0, 0, 0)], truth)
    code = cli.main(['eval', '--tracks', tracks, '--truth', truth])
    assert code == 2
    assert 'MSE' in capsys.readouterr().err


def test_malformed_record(tmpdir, capsys):
    """Tests the data error exit code for a broken log line."""
    sensors = tmpdir.join('sensor.jsonl')
    sensors.write('{"type":"sensor_frame","t":0}\n')
    code = cli.main(['fuse', '--sensors', str(sensors),
                     '--out', str(tmpdir.join('out.jsonl'))])
    assert code == 2
    assert 'line 1' in capsys.readouterr().err


def test_fuse_failure_leaves_previous_output(tmpdir):
    """Tests that a log broken midway leaves the old output untouched."""
    sensors = str(tmpdir.join('sensor.jsonl'))
    write_jsonl([SensorFrame(0.0, 'Lidar', [[5, 2, 0, 0]]),
                 SensorFrame(0.04, 'Radar', [[5, 2, 0, 0]])], sensors)
    with open(sensors, 'a') as f:
        f.write('{"type":"sensor_frame","t":0.08}\n')
    out = tmpdir.join('tracks.jsonl')
    out.write('previous\n')
    code = cli.main(['fuse', '--sensors', sensors, '--out', str(out)])
    assert code == 2
    assert out.read() == 'previous\n'
    assert sorted(os.listdir(str(tmpdir))) == ['sensor.jsonl', 'tracks.jsonl']


@pytest.mark.parametrize('argv', [
    [],
    ['fuse', '--sensors', 'x.jsonl'],
    ['fuse', '--sensors', 'x', '--out', 'y', '--bogus'],
    ['simulate', '--scenario', 'city', '--out', 'x'],
    ['simulate', '--radar-dropout', '5:1', '--out', 'x'],
])
def test_usage_errors(argv, capsys):
    """Tests the usage error exit code."""
    assert cli.main(argv) == 1
    assert 'usage' in capsys.readouterr().err


def test_bench_command(capsys):
    """Tests the JSON summary of a tiny benchmark."""
    assert cli.main(['bench', '--obstacles', '2', '--cycles', '5']) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary['n_cycles'] == 5


def test_window():
    """Tests START:END parsing."""
    assert cli.window('20:23') == (20.0, 23.0)
