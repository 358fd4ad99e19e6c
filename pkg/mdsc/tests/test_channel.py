import json
import tempfile
from pathlib import Path

import numpy as np
import pandas as pd
from django.test import SimpleTestCase, tag

from mdsc.channel import (
    CSV_COLUMNS,
    BerRecord,
    SimPlan,
    curve_frame,
    emit_curve,
    flag_inversions,
    frame_llr,
    load_curve,
    noise_variance,
    simulate,
)
from mdsc.decoder import DecodeConfig
from mdsc.exceptions import SpecValidationError


def short_plan(**overrides):
    data = {'code': 'sc1', 'L': 3, 'snr_db': [30.0], 'max_frames': 4, 'min_bit_errors': 1, 'seed': 3}
    data.update(overrides)
    return SimPlan.from_dict(data)


class SimPlanTests(SimpleTestCase):
    def test_defaults_and_round_trip(self):
        plan = short_plan()
        self.assertEqual(plan.snr_db, (30.0,))
        self.assertEqual(plan.decoder, DecodeConfig())
        self.assertEqual(SimPlan.from_dict(plan.to_dict()), plan)

    def test_hash_tracks_content(self):
        self.assertEqual(short_plan().plan_hash, short_plan().plan_hash)
        self.assertNotEqual(short_plan().plan_hash, short_plan(seed=4).plan_hash)

    def test_invalid_plans_rejected(self):
        cases = [
            {'snr_db': []},
            {'max_frames': 0},
            {'mode': 'turbo'},
            {'mode': 'windowed'},
            {'mode': 'md-windowed', 'window': 3},
            {'mode': 'windowed', 'window': 3, 'md_map': 'm2'},
            {'snr_convention': 'EsN0'},
            {'colour': 'blue'},
        ]
        for overrides in cases:
            with self.subTest(overrides=overrides), self.assertRaises(SpecValidationError):
                short_plan(**overrides)


class NoiseTests(SimpleTestCase):
    def test_noise_variance(self):
        self.assertAlmostEqual(noise_variance(0.0, 0.5), 1.0)
        self.assertAlmostEqual(noise_variance(10.0, 0.5), 0.1)

    def test_frames_replay_from_their_coordinates(self):
        first = frame_llr(7, 1, 42, 100, 0.5)
        self.assertTrue(np.array_equal(first, frame_llr(7, 1, 42, 100, 0.5)))
        self.assertFalse(np.array_equal(first, frame_llr(7, 1, 43, 100, 0.5)))
        self.assertFalse(np.array_equal(first, frame_llr(7, 2, 42, 100, 0.5)))

    def test_llr_scale(self):
        llr = frame_llr(0, 0, 0, 200000, 0.25)
        # mean of 2y / sigma^2 for y ~ N(1, sigma^2)
        self.assertAlmostEqual(llr.mean(), 8.0, delta=0.05)


class BerRecordTests(SimpleTestCase):
    def test_rates_and_intervals(self):
        record = BerRecord(snr_db=3.0, frames=100, bit_errors=50, frame_errors=10, length=1000)
        self.assertAlmostEqual(record.ber, 5e-4)
        self.assertAlmostEqual(record.fer, 0.1)
        low, high = record.ber_interval()
        self.assertLess(low, record.ber)
        self.assertGreater(high, record.ber)
        low, high = record.fer_interval()
        self.assertLess(low, 0.1)
        self.assertGreater(high, 0.1)

    def test_empty_record(self):
        record = BerRecord(snr_db=3.0, frames=0, bit_errors=0, frame_errors=0, length=10)
        self.assertEqual(record.ber, 0.0)
        self.assertEqual(record.ber_interval(), (0.0, 1.0))

    def test_wall_time_ignored_in_comparison(self):
        a = BerRecord(3.0, 10, 1, 1, 10, wall_time=1.0)
        self.assertEqual(a, BerRecord(3.0, 10, 1, 1, 10, wall_time=9.0))
        self.assertEqual(BerRecord.from_dict(a.to_dict()), a)

    def test_malformed_record_reported(self):
        with self.assertRaises(SpecValidationError):
            BerRecord.from_dict({'snr_db': 1.0})

    def test_rising_ber_flagged(self):
        records = [
            BerRecord(3.0, 1000, 100, 50, 1000),
            BerRecord(3.5, 1000, 5000, 500, 1000),
        ]
        with self.assertLogs('mdsc.channel', 'WARNING'):
            self.assertEqual(flag_inversions(records), [(3.0, 3.5)])
        self.assertEqual(flag_inversions(records[:1]), [])


class CurveOutputTests(SimpleTestCase):
    def setUp(self):
        self.records = [BerRecord(4.0, 10, 0, 0, 100), BerRecord(3.0, 10, 20, 2, 100)]

    def test_frame_sorted_by_snr(self):
        frame = curve_frame(self.records)
        self.assertEqual(list(frame.columns), CSV_COLUMNS)
        self.assertEqual(list(frame['snr_db']), [3.0, 4.0])

    def test_csv_and_json_files(self):
        with tempfile.TemporaryDirectory() as tmp:
            csv_path = emit_curve(self.records, Path(tmp) / 'curve.csv')
            self.assertEqual(list(pd.read_csv(csv_path)['bit_errors']), [20, 0])
            json_path = emit_curve(self.records, Path(tmp) / 'curve.json', fmt='json')
            self.assertEqual(load_curve(json_path), self.records)
            with self.assertRaises(SpecValidationError):
                emit_curve(self.records, Path(tmp) / 'curve.xml', fmt='xml')
            (Path(tmp) / 'bad.json').write_text('not json')
            with self.assertRaises(SpecValidationError):
                load_curve(Path(tmp) / 'bad.json')


class SimulationTests(SimpleTestCase):
    def test_high_snr_frames_are_error_free(self):
        records = simulate(short_plan())
        self.assertEqual(len(records), 1)
        self.assertEqual(records[0].frames, 4)
        self.assertEqual(records[0].bit_errors, 0)
        self.assertEqual(records[0].length, 3 * 17 * 17)

    def test_stops_after_enough_bit_errors(self):
        plan = short_plan(snr_db=[0.0], max_frames=64, min_bit_errors=1)
        record = simulate(plan, chunk_frames=2)[0]
        self.assertGreater(record.bit_errors, 0)
        self.assertLess(record.frames, 64)
        self.assertEqual(record.frames % 2, 0)

    def test_checkpoint_resume_skips_finished_points(self):
        plan = short_plan(snr_db=[1.0, 30.0], max_frames=4, min_bit_errors=10 ** 6)
        seen = []
        with tempfile.TemporaryDirectory() as tmp:
            checkpoint = Path(tmp) / 'run.ckpt'
            first = simulate(plan, chunk_frames=2, checkpoint=checkpoint, on_point=seen.append)
            state = json.loads(checkpoint.read_text())
            self.assertEqual(state['plan_hash'], plan.plan_hash)
            self.assertTrue(all(point['done'] for point in state['points'].values()))
            second = simulate(plan, chunk_frames=2, checkpoint=checkpoint, on_point=seen.append)
        self.assertEqual(first, second)
        self.assertEqual(len(seen), 2)

    def test_foreign_checkpoint_ignored(self):
        with tempfile.TemporaryDirectory() as tmp:
            checkpoint = Path(tmp) / 'run.ckpt'
            checkpoint.write_text(json.dumps({'plan_hash': 'other', 'points': {'0': {'done': True}}}))
            with self.assertLogs('mdsc.channel', 'WARNING'):
                records = simulate(short_plan(), checkpoint=checkpoint)
        self.assertEqual(records[0].frames, 4)

    def test_corrupt_checkpoint_rejected(self):
        with tempfile.TemporaryDirectory() as tmp:
            checkpoint = Path(tmp) / 'run.ckpt'
            checkpoint.write_text('{"plan_hash": ')
            with self.assertRaises(SpecValidationError):
                simulate(short_plan(), checkpoint=checkpoint)
            checkpoint.write_text('[1, 2]')
            with self.assertRaises(SpecValidationError):
                simulate(short_plan(), checkpoint=checkpoint)

    def test_windowed_modes_run_every_window(self):
        plan = short_plan(mode='windowed', window=2)
        self.assertEqual(simulate(plan)[0].bit_errors, 0)
        plan = short_plan(mode='md-windowed', window=2, md_map={'L2': 2, 'd': 2, 'maps': [[[0] * 17] * 4] * 2})
        record = simulate(plan)[0]
        self.assertEqual(record.bit_errors, 0)
        self.assertEqual(record.length, 2 * 3 * 17 * 17)

    @tag('slow')
    def test_results_do_not_depend_on_worker_count(self):
        plan = short_plan(snr_db=[1.5, 2.0], max_frames=6, min_bit_errors=10 ** 6)
        serial = simulate(plan, workers=1, chunk_frames=2)
        parallel = simulate(plan, workers=2, chunk_frames=2)
        self.assertEqual(serial, parallel)

    @tag('slow')
    def test_md_windowed_decoding_of_built_map(self):
        plan = SimPlan.from_dict({
            'code': 'sc1', 'L': 10, 'md_map': 'm11', 'snr_db': [30.0], 'max_frames': 1,
            'mode': 'md-windowed', 'window': 4,
        })
        record = simulate(plan)[0]
        self.assertEqual(record.frames, 1)
        self.assertEqual(record.bit_errors, 0)
        self.assertEqual(record.length, 5 * 2890)


WORKERS = 4


def run_point(**fields):
    return simulate(SimPlan.from_dict({'seed': 11, **fields}), workers=WORKERS)[0]


@tag('slow')
class DecoderSanityTests(SimpleTestCase):
    def test_below_the_waterfall(self):
        record = run_point(code='sc1', L=10, snr_db=[0.0], max_frames=20, min_bit_errors=2000)
        self.assertGreater(record.ber, 1e-2)

    def test_above_the_waterfall(self):
        record = run_point(code='sc1', L=10, snr_db=[5.0], max_frames=400, min_bit_errors=10 ** 9)
        self.assertGreaterEqual(record.frames * record.length, 10 ** 6)
        self.assertLess(record.ber, 1e-5)


@tag('published', 'slow')
class MultiDimensionalGainTests(SimpleTestCase):
    def assertSeparated(self, better, worse):
        self.assertGreater(worse.bit_errors, 0)
        self.assertLess(better.ber_interval()[1], worse.ber_interval()[0])

    def test_md_sc_code_2_beats_sc_code_2(self):
        md = run_point(code='sc1', L=10, md_map='m2', snr_db=[4.1], max_frames=3000, min_bit_errors=100)
        sc = run_point(code='sc1', L=30, snr_db=[4.1], max_frames=3000, min_bit_errors=500)
        self.assertEqual(md.length, sc.length)
        self.assertSeparated(md, sc)

    def test_md_sc_code_3_beats_sc_code_3(self):
        md = run_point(code='sc1', L=10, md_map='m3', snr_db=[3.85], max_frames=2000, min_bit_errors=100)
        sc = run_point(code='sc1', L=50, snr_db=[3.85], max_frames=2000, min_bit_errors=500)
        self.assertEqual(md.length, sc.length)
        self.assertSeparated(md, sc)


@tag('published', 'slow')
class WindowedDegradationTests(SimpleTestCase):
    frames = 300

    def point(self, snr, **fields):
        return run_point(code='sc1', L=10, md_map='m11', snr_db=[snr], max_frames=self.frames,
                         min_bit_errors=10 ** 9, **fields)

    def test_window_4_stays_close_to_block_decoding(self):
        sweep = simulate(SimPlan.from_dict({
            'code': 'sc1', 'L': 10, 'md_map': 'm11', 'snr_db': [2.5, 2.75, 3.0, 3.25, 3.5, 3.75, 4.0],
            'max_frames': self.frames, 'min_bit_errors': 10 ** 9, 'seed': 11,
        }), workers=WORKERS)
        # highest SNR that still has enough errors to compare against
        waterfall = [record for record in sweep if record.bit_errors >= 100 and record.ber < 1e-2]
        self.assertTrue(waterfall)
        snr = waterfall[-1].snr_db

        block = self.point(snr)
        four = self.point(snr, mode='md-windowed', window=4)
        three = self.point(snr, mode='md-windowed', window=3)
        self.assertGreater(block.bit_errors, 0)
        self.assertLessEqual(four.ber, 10 ** 0.5 * block.ber)
        self.assertGreaterEqual(four.ber, 10 ** -0.5 * block.ber)
        self.assertLessEqual(four.ber, three.ber)
