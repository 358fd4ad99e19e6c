from unittest import mock

from django.conf import settings
from django.test import Client, TestCase, override_settings

from mdsc.channel import BerRecord
from mdsc.models import BerPoint, SimulationRun


def capped(limit):
    return override_settings(MDSC_SETTINGS={**settings.MDSC_SETTINGS, 'DENSE_EXPORT_LIMIT': limit})


class CodeViewTests(TestCase):
    def setUp(self):
        self.client = Client()

    def test_list_codes(self):
        response = self.client.get('/api/codes/')
        self.assertEqual(response.status_code, 200)
        names = [code['name'] for code in response.json()['codes']]
        self.assertEqual(names, ['sc1', 'sc4', 'sc6'])

    def test_code_at_another_length(self):
        response = self.client.get('/api/codes/sc1/', {'L': 30})
        self.assertEqual(response.status_code, 200)
        self.assertEqual(response.json()['length'], 8670)

    def test_unknown_code(self):
        response = self.client.get('/api/codes/sc9/')
        self.assertEqual(response.status_code, 404)
        self.assertIn('sc9', response.json()['error'])

    def test_bad_length(self):
        self.assertEqual(self.client.get('/api/codes/sc1/', {'L': 0}).status_code, 400)
        self.assertEqual(self.client.get('/api/codes/sc1/', {'L': 1}).status_code, 400)

    def test_post_not_allowed(self):
        self.assertEqual(self.client.post('/api/codes/').status_code, 405)


class MatrixViewTests(TestCase):
    def setUp(self):
        self.client = Client()

    def test_alist_download(self):
        response = self.client.get('/api/codes/sc6/matrix/')
        self.assertEqual(response.status_code, 200)
        self.assertEqual(response.content.splitlines()[0], b'4335 816')

    def test_md_matrix_download(self):
        response = self.client.get('/api/codes/sc6/matrix/', {'md_map': 'm8', 'format': 'matrix-market'})
        self.assertEqual(response.status_code, 200)
        self.assertIn(b'2448 13005', response.content)

    def test_map_of_another_code(self):
        response = self.client.get('/api/codes/sc1/matrix/', {'md_map': 'm8'})
        self.assertEqual(response.status_code, 400)

    def test_recipe_of_another_code_is_not_built(self):
        with mock.patch('mdsc.optimizer.construct_md') as construct:
            response = self.client.get('/api/codes/sc6/matrix/', {'md_map': 'm11'})
        self.assertEqual(response.status_code, 400)
        self.assertIn('sc1', response.json()['error'])
        construct.assert_not_called()

    def test_dense_export_over_the_cap(self):
        response = self.client.get('/api/codes/sc1/matrix/', {'format': 'dense-text'})
        self.assertEqual(response.status_code, 413)

    @capped(10)
    def test_cap_comes_from_settings(self):
        response = self.client.get('/api/codes/sc6/matrix/', {'format': 'dense-text', 'L': 2})
        self.assertEqual(response.status_code, 413)

    def test_unknown_format(self):
        response = self.client.get('/api/codes/sc6/matrix/', {'format': 'png'})
        self.assertEqual(response.status_code, 400)


class MapViewTests(TestCase):
    def setUp(self):
        self.client = Client()

    def test_map_fixture(self):
        data = self.client.get('/api/maps/m8/').json()
        self.assertEqual(data['code'], 'sc6')
        self.assertEqual(data['density'], 9)
        self.assertEqual(data['mapping']['L2'], 3)
        self.assertEqual(data['length'], 3 * 4335)

    def test_recipe_is_described_not_built(self):
        data = self.client.get('/api/maps/m11/').json()
        self.assertEqual(data['code'], 'sc1')
        self.assertEqual(data['recipe'], {'L2': 5, 'd': 2, 'T': 18, 'k': 6, 'seed': 0})
        self.assertNotIn('mapping', data)

    def test_unknown_map(self):
        self.assertEqual(self.client.get('/api/maps/m99/').status_code, 404)


class RunViewTests(TestCase):
    def setUp(self):
        self.client = Client()
        self.run = SimulationRun.objects.create(
            code='sc1', L=10, md_map='m2', mode='block', seed=7,
            plan={'code': 'sc1', 'md_map': 'm2'}, plan_hash='0' * 64, status='done',
        )
        BerPoint.from_record(self.run, BerRecord(snr_db=4.1, frames=1000, bit_errors=3, frame_errors=1, length=8670))
        BerPoint.from_record(self.run, BerRecord(snr_db=3.6, frames=200, bit_errors=150, frame_errors=20, length=8670))

    def test_list_runs(self):
        runs = self.client.get('/api/runs/').json()['runs']
        self.assertEqual(len(runs), 1)
        self.assertEqual(runs[0]['md_map'], 'm2')
        self.assertEqual(runs[0]['points'], 2)

    def test_curve_with_intervals(self):
        data = self.client.get(f'/api/runs/{self.run.id}/curve/').json()
        self.assertEqual([p['snr_db'] for p in data['points']], [3.6, 4.1])
        for point in data['points']:
            low, high = point['ber_interval']
            self.assertLessEqual(low, point['ber'])
            self.assertLessEqual(point['ber'], high)
            low, high = point['fer_interval']
            self.assertLessEqual(low, point['fer'])
            self.assertLessEqual(point['fer'], high)

    def test_missing_run(self):
        self.assertEqual(self.client.get(f'/api/runs/{self.run.id + 1}/curve/').status_code, 404)


class LatencyViewTests(TestCase):
    def setUp(self):
        self.client = Client()

    def test_bound(self):
        data = self.client.get('/api/latency/', {'W_D': 3, 'm': 1, 'L': 10, 'T_rec': 1, 'T_dec': 1}).json()
        self.assertAlmostEqual(data['factor'], 0.4)
        self.assertAlmostEqual(data['bound'], 0.8)

    def test_window_out_of_range(self):
        response = self.client.get('/api/latency/', {'W_D': 1, 'm': 1, 'L': 10, 'T_rec': 1, 'T_dec': 1})
        self.assertEqual(response.status_code, 400)
        self.assertIn('Window size', response.json()['error'])


class RunModelTests(TestCase):
    def test_point_upsert_and_curve(self):
        run = SimulationRun.objects.create(code='sc6', L=15, mode='windowed', window=3, plan={}, plan_hash='a' * 64)
        self.assertEqual(str(run), 'sc6 L=15 (windowed, running)')
        BerPoint.from_record(run, BerRecord(snr_db=3.0, frames=10, bit_errors=5, frame_errors=1, length=4335))
        BerPoint.from_record(run, BerRecord(snr_db=3.0, frames=20, bit_errors=6, frame_errors=2, length=4335))
        self.assertEqual(run.points.count(), 1)
        record = run.records()[0]
        self.assertEqual((record.frames, record.bit_errors), (20, 6))
        frame = run.curve()
        self.assertEqual(list(frame['frames']), [20])
        self.assertAlmostEqual(frame['fer'][0], 0.1)
