# tests/unit/cli/test_cli_service.py

import pytest
import json
from glassbox.cli import main
from glassbox.evalbench import EvalReport, StabilityRecord, machine_descriptor
from glassbox.store import artifact_hash, read_manifest, load_attributions, load_model

SMALL = ['--n', '40', '--timepoints', '12', '--species', '6', '--communities', '3']

def simulate_into(root, name='data', seed='7', extra=()):
    code = main(['simulate', *SMALL, '--seed', seed, '--out', str(root), '--name', name, '--quiet', *extra])
    assert code == 0
    return root / 'datasets' / name

@pytest.fixture
def dataset(tmp_path):
    return simulate_into(tmp_path)

@pytest.fixture
def raw_logistic(tmp_path, dataset):
    code = main(['fit', str(dataset), '--model', 'sparse_logistic', '--representation', 'raw', '--n-lambda', '5',
        '--out', str(tmp_path), '--name', 'logistic', '--quiet'])
    assert code == 0
    return tmp_path / 'models' / 'logistic'

class TestSimulate:
    """
    Tests for the simulate subcommand.
    """

    def test_reruns_have_identical_hashes(self, tmp_path):
        first = simulate_into(tmp_path, 'first')
        second = simulate_into(tmp_path, 'second', extra=['--deterministic'])
        assert artifact_hash(first) == artifact_hash(second)

    def test_different_seed_changes_hash(self, tmp_path):
        assert artifact_hash(simulate_into(tmp_path, 'a', '1')) != artifact_hash(simulate_into(tmp_path, 'b', '2'))

    def test_zero_subjects_is_a_usage_error(self, tmp_path, capsys):
        assert main(['simulate', '--n', '0', '--out', str(tmp_path)]) == 2
        assert '--n' in capsys.readouterr().err
        assert not (tmp_path / 'datasets').exists()

    def test_unknown_flag_is_a_usage_error(self, tmp_path):
        assert main(['simulate', '--bogus', '--out', str(tmp_path)]) == 2

    def test_existing_artifact_needs_overwrite(self, tmp_path, capsys):
        simulate_into(tmp_path)
        assert main(['simulate', *SMALL, '--out', str(tmp_path), '--name', 'data', '--quiet']) == 1
        assert 'FileExistsError' in capsys.readouterr().err
        simulate_into(tmp_path, extra=['--overwrite'])

    def test_prints_summary(self, tmp_path, capsys):
        main(['simulate', *SMALL, '--out', str(tmp_path), '--quiet'])
        output = capsys.readouterr().out
        assert 'Subjects (N)' in output
        assert (tmp_path / 'datasets' / 'sim-n40-seed0').is_dir()

    def test_print_config_writes_nothing(self, tmp_path, capsys):
        assert main(['simulate', '--n', '40', '--out', str(tmp_path), '--print-config']) == 0
        document = json.loads(capsys.readouterr().out)
        assert document['command'] == 'simulate'
        assert document['args']['n'] == 40
        assert document['args']['species'] == 144
        assert not (tmp_path / 'datasets').exists()

    def test_output_root_from_environment(self, tmp_path, monkeypatch):
        monkeypatch.setenv('GLASSBOX_OUT', str(tmp_path / 'env_root'))
        assert main(['simulate', *SMALL, '--name', 'data', '--quiet']) == 0
        assert (tmp_path / 'env_root' / 'datasets' / 'data' / 'manifest.json').is_file()

    def test_thread_limit(self, tmp_path, mocker):
        limits = mocker.patch('glassbox.cli.service.threadpool_limits')
        simulate_into(tmp_path, extra=['--deterministic'])
        limits.assert_called_once_with(limits=1)

class TestFitAndExplain:
    """
    Tests for the fit, featurize and explain subcommands.
    """

    def test_featurize(self, tmp_path, dataset):
        assert main(['featurize', str(dataset), '--out', str(tmp_path), '--quiet']) == 0
        manifest = read_manifest(tmp_path / 'features' / 'data-featurized')
        assert manifest.summary['n_features'] == 12

    def test_fit_records_active_features(self, raw_logistic):
        manifest = read_manifest(raw_logistic)
        assert manifest.summary['model'] == 'sparse_logistic'
        assert 'n_active_features' in manifest.summary
        assert manifest.upstream[0].kind == 'dataset'

    def test_unknown_model(self, tmp_path, dataset, capsys):
        assert main(['fit', str(dataset), '--model', 'forest', '--out', str(tmp_path)]) == 2
        assert 'available' in capsys.readouterr().err

    def test_sequence_model_needs_raw(self, tmp_path, dataset, capsys):
        code = main(['fit', str(dataset), '--model', 'cbm', '--representation', 'featurized', '--out', str(tmp_path),
            '--quiet'])
        assert code == 1
        assert 'raw token representation' in capsys.readouterr().err

    def test_transformer_checkpoint_and_log(self, tmp_path, dataset):
        code = main(['fit', str(dataset), '--model', 'cbm', '--epochs', '2', '--n-head', '2', '--out', str(tmp_path),
            '--name', 'cbm', '--quiet'])
        assert code == 0
        lines = (tmp_path / 'models' / 'cbm' / 'training_log.csv').read_text().splitlines()
        assert len(lines) == 1 + 2 * 2
        assert load_model(tmp_path / 'models' / 'cbm').fit.config.n_embd == 6

    def test_integrated_gradients(self, tmp_path, raw_logistic, capsys):
        code = main(['explain', str(raw_logistic), '--samples', '0', '3', '--n-steps', '8', '--out', str(tmp_path),
            '--name', 'ig'])
        assert code == 0
        assert 'Completeness gap' in capsys.readouterr().out
        attributions = load_attributions(tmp_path / 'explanations' / 'ig')
        assert [a.sample_id for a in attributions] == [0, 3]
        assert attributions[0].values.shape == (12, 6)
        assert (tmp_path / 'explanations' / 'ig' / 'figures' / 'sample_3.svg').exists()

    def test_attributions_need_a_trajectory_model(self, tmp_path, dataset, capsys):
        main(['fit', str(dataset), '--model', 'tree', '--out', str(tmp_path), '--name', 'tree', '--quiet'])
        assert main(['explain', str(tmp_path / 'models' / 'tree'), '--out', str(tmp_path), '--quiet']) == 1
        assert 'raw representation' in capsys.readouterr().err

    def test_sample_out_of_range(self, tmp_path, raw_logistic, capsys):
        assert main(['explain', str(raw_logistic), '--samples', '40', '--out', str(tmp_path), '--quiet']) == 1
        assert 'out of range' in capsys.readouterr().err

    def test_pdp_by_feature_name(self, tmp_path, dataset):
        main(['fit', str(dataset), '--model', 'sparse_logistic', '--n-lambda', '5', '--out', str(tmp_path),
            '--name', 'featurized', '--quiet'])
        code = main(['explain', str(tmp_path / 'models' / 'featurized'), '--method', 'pdp', '--features', 'trend:d=2',
            '--out', str(tmp_path), '--name', 'pdp', '--quiet'])
        assert code == 0
        assert (tmp_path / 'explanations' / 'pdp' / 'feature_2.svg').exists()
        assert (tmp_path / 'explanations' / 'pdp' / 'feature_2.csv').read_text().startswith('value,prediction')

    def test_raw_sparse_pca(self, tmp_path, raw_logistic):
        code = main(['explain', str(raw_logistic), '--method', 'embeddings', '--out', str(tmp_path), '--name', 'spca',
            '--quiet'])
        assert code == 0
        assert (tmp_path / 'explanations' / 'spca' / 'scatter.svg').exists()

class TestEvalAndReport:
    """
    Tests for the eval and report subcommands.
    """

    def test_faithfulness_from_stored_attributions(self, tmp_path, raw_logistic, capsys):
        main(['explain', str(raw_logistic), '--samples', '0', '1', '2', '--n-steps', '8', '--out', str(tmp_path),
            '--name', 'ig', '--no-figures', '--quiet'])
        code = main(['eval', 'faithfulness', '--attributions', str(tmp_path / 'explanations' / 'ig'), '--k', '10',
            '--out', str(tmp_path), '--name', 'faith', '--quiet'])
        assert code == 0
        assert 'Precision@k' in capsys.readouterr().out
        assert read_manifest(tmp_path / 'reports' / 'faith').upstream[0].kind == 'attributions'

    def test_ablation_on_stored_dataset(self, tmp_path, dataset, capsys):
        code = main(['eval', 'ablation', '--dataset', str(dataset), '--q', '0.1', '--n-lambda', '5', '--n-samples', '4',
            '--n-steps', '4', '--out', str(tmp_path), '--name', 'ablation', '--quiet'])
        assert code == 0
        assert 'Gap' in capsys.readouterr().out

    def test_stability_passes_configuration(self, tmp_path, mocker, capsys):
        report = EvalReport(machine=machine_descriptor(), suite='stability', stability=[
            StabilityRecord(representation='raw', seed=0, n_subjects=500, active_sizes=[10, 12], overlap=2,
                sign_agreement=1.0, intersection=['raw:t=3:d=1', 'raw:t=9:d=4']),
            StabilityRecord(representation='featurized', seed=0, n_subjects=500, active_sizes=[20, 22], overlap=18,
                sign_agreement=1.0, intersection=[])])
        run = mocker.patch('glassbox.cli.commands.run_stability', return_value=report)
        assert main(['eval', 'stability', '--seeds', '0', '1', '--out', str(tmp_path), '--quiet']) == 0
        sim = run.call_args.args[0]
        assert sim.n_subjects == 500
        assert run.call_args.kwargs['seeds'] == (0, 1)
        assert 'Overlap' in capsys.readouterr().out

    def test_table1_defaults(self, tmp_path, mocker):
        run = mocker.patch('glassbox.cli.commands.run_table1',
            return_value=EvalReport(machine=machine_descriptor(), suite='table1'))
        assert main(['eval', 'table1', '--n', '500', '--epochs', '70', '--out', str(tmp_path), '--quiet']) == 0
        config = run.call_args.args[0]
        assert config.n_list == (500,)
        assert config.transformer.epochs == 70
        assert config.transformer.n_embd == 144

    def test_report_regenerates_figures(self, tmp_path, raw_logistic, capsys):
        main(['explain', str(raw_logistic), '--samples', '5', '--n-steps', '4', '--out', str(tmp_path), '--name', 'ig',
            '--no-figures', '--quiet'])
        code = main(['report', str(tmp_path / 'explanations' / 'ig'), str(raw_logistic), '--out', str(tmp_path),
            '--quiet'])
        assert code == 0
        assert (tmp_path / 'regenerated' / 'ig' / 'sample_5.svg').exists()
        assert (tmp_path / 'regenerated' / 'ig' / 'trajectories_5.svg').exists()
        assert (tmp_path / 'regenerated' / 'logistic' / 'coefficient_path.svg').exists()

    def test_report_draws_probe_trajectories(self, tmp_path, raw_logistic, capsys):
        code = main(['explain', str(raw_logistic), '--method', 'embeddings', '--probe', '0', '1', '--out', str(tmp_path),
            '--name', 'spca', '--quiet'])
        assert code == 0
        assert main(['report', str(tmp_path / 'explanations' / 'spca'), '--out', str(tmp_path), '--quiet']) == 0
        regenerated = tmp_path / 'regenerated' / 'spca'
        assert (regenerated / 'scatter.svg').exists()
        assert '<svg' in (regenerated / 'probe_trajectories.svg').read_text()

    def test_report_rejects_tampered_artifact(self, tmp_path, dataset, capsys):
        target = dataset / 'y.gbl'
        data = bytearray(target.read_bytes())
        data[-1] ^= 0xFF
        target.write_bytes(bytes(data))
        assert main(['report', str(dataset), '--out', str(tmp_path), '--quiet']) == 1
        assert 'y.gbl' in capsys.readouterr().err
