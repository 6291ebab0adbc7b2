import json
import math

import numpy as np

import _sudest as sd


def test_version():
    assert isinstance(sd.__version__, str) and sd.__version__


def test_designs():
    vectors = sd.mub_vectors(2)
    assert len(vectors) == 6
    cert = sd.certify_2design(vectors)
    assert cert["is_design"]
    assert sd.chernoff_sample_size(2, 0.5, 0.95) == 160


def test_qfi_optimum():
    chart = sd.chart_at_identity(2)
    state = sd.state_from_mub(2, 2)
    h = sd.qfi(state, chart, np.zeros(3))
    assert np.allclose(h, (16.0 / 3.0) * np.eye(3), atol=1e-10)
    assert math.isclose(sd.optimal_tr_inverse_bound(2, 2), 0.5625, rel_tol=1e-12)
    assert sd.attainability_defect(state, chart, np.zeros(3)) < 1e-10


def test_measurement():
    chart = sd.chart_at_identity(2)
    state = sd.state_from_sic(2, 2)
    povm = sd.optimal_povm(state, chart, np.zeros(3))
    p = sd.outcome_probabilities(povm, np.zeros(3))
    assert math.isclose(float(np.sum(p)), 1.0, abs_tol=1e-10)
    fi = sd.fisher_information(povm, np.zeros(3))
    assert np.allclose(fi, sd.optimal_qfi(2, 2), atol=1e-8)


def test_experiment_roundtrip():
    config = {
        "d": 2,
        "n": 1,
        "shots": 200,
        "trials": 4,
        "input": "mub",
        "measurement": "optimal",
        "strategy": "oracle",
        "seed": 12345,
        "threads": 1,
    }
    report = json.loads(sd.run_experiment_json(json.dumps(config)))
    assert report["seed_used"] == 12345
    assert report["converged_trials"] + report["excluded_trials"] == 4
    assert report["bound"] > 0
    again = json.loads(sd.run_experiment_json(json.dumps(config)))
    assert again["mse_trace"] == report["mse_trace"]


def test_validation_errors_surface():
    try:
        sd.mub_vectors(4)
    except ValueError:
        pass
    else:
        raise AssertionError("composite d must raise")


def main():
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_")]
    for test in tests:
        test()
        print(f"ok {test.__name__}")
    print(f"{len(tests)} python smoke tests passed")


if __name__ == "__main__":
    main()
