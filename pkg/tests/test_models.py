import numpy as np
import pytest

from dcsbm.models import (DcbmParams, ParameterError, ThetaSpec, format_params, make_rng,
                          parse_params, population_quantities, rho_for_expected_degree,
                          sample_graph_given, sample_network, validate)

P_ASSORT = [[4.0, 1.0], [1.0, 4.0]]


class TestRhoScaling:
    def test_worked_example(self):
        assert rho_for_expected_degree(125, 1000, [0.5, 0.5], P_ASSORT) == pytest.approx(0.05, abs=1e-15)

    def test_zero_degree(self):
        assert rho_for_expected_degree(0, 1000, [0.5, 0.5], P_ASSORT) == 0.0

    def test_erdos_renyi_reduction(self):
        assert rho_for_expected_degree(300 * 0.2, 300, [1.0], [[1.0]]) == pytest.approx(0.2)

    def test_infeasible_degree(self):
        # two-point m = 10 needs rho * 4 * (20/11)^2 <= 1
        with pytest.raises(ParameterError):
            rho_for_expected_degree(125, 300, [0.5, 0.5], P_ASSORT, ThetaSpec.two_point(10))


class TestValidate:
    def test_ok(self):
        p = validate(DcbmParams(pi=[0.5, 0.5], P=P_ASSORT, rho=0.05, theta=ThetaSpec.two_point(4)))
        assert p.K == 2

    @pytest.mark.parametrize("kwargs, msg", [
        (dict(pi=[0.6, 0.6], P=P_ASSORT), "probability vector"),
        (dict(pi=[1.0, 0.0], P=P_ASSORT), "probability vector"),
        (dict(pi=[0.5, 0.5], P=[[4, 1], [2, 4]]), "symmetric"),
        (dict(pi=[0.5, 0.5], P=[[4, -1], [-1, 4]]), "nonnegative"),
        (dict(pi=[0.5, 0.5], P=[[1.0]]), "2x2"),
        (dict(pi=[0.5, 0.5], P=P_ASSORT, rho=1.5), "rho"),
        (dict(pi=[0.5, 0.5], P=P_ASSORT, rho=0.1, theta=ThetaSpec.two_point(10)), "bound violated"),
    ])
    def test_errors(self, kwargs, msg):
        with pytest.raises(ParameterError, match=msg):
            validate(DcbmParams(**kwargs))

    def test_joint_must_match_pi(self):
        theta = ThetaSpec("discrete", values=(0.5, 1.5), probs=(0.5, 0.5))
        ok = DcbmParams(pi=[0.5, 0.5], P=P_ASSORT, rho=0.01, theta=theta,
                        joint=[[0.25, 0.25], [0.25, 0.25]])
        validate(ok)
        with pytest.raises(ParameterError):
            validate(DcbmParams(pi=[0.5, 0.5], P=P_ASSORT, rho=0.01, theta=theta,
                                joint=[[0.4, 0.2], [0.2, 0.2]]))

    def test_theta_spec_errors(self):
        with pytest.raises(ParameterError):
            ThetaSpec.two_point(0.5)
        with pytest.raises(ParameterError):
            ThetaSpec.mixture(2, 1.5)
        with pytest.raises(ParameterError, match="E\\[theta\\]"):
            ThetaSpec("discrete", values=(1.0, 2.0), probs=(0.5, 0.5))


class TestTheta:
    def test_two_point_values(self):
        v, p = ThetaSpec.two_point(4).support()
        assert v.tolist() == pytest.approx([0.4, 1.6]) and p.tolist() == [0.5, 0.5]
        assert ThetaSpec.two_point(1).support()[0].tolist() == [1.0]

    @pytest.mark.parametrize("spec", [ThetaSpec.constant(), ThetaSpec.two_point(10),
                                      ThetaSpec.mixture(10, 0.5), ThetaSpec.mixture(3, 1.0)])
    def test_moments(self, spec):
        x = spec.sample(make_rng(5), 10**6)
        se = np.sqrt(max(spec.variance, 1e-300) / x.size)
        assert abs(x.mean() - 1.0) <= 4 * se + 1e-12
        if spec.variance > 0:
            # variance of the sample variance ~ (mu4 - sigma^4) / N; bound mu4 by sup^2 * var
            se_var = np.sqrt(spec.sup ** 2 * spec.variance / x.size)
            assert abs(x.var() - spec.variance) <= 4 * se_var


def _params(theta=ThetaSpec.constant(), rho=0.05, pi=(0.5, 0.5), P=P_ASSORT):
    return validate(DcbmParams(pi=np.array(pi), P=np.array(P), rho=rho, theta=theta))


class TestSampler:
    def test_seed_determinism(self):
        p = _params(ThetaSpec.two_point(4), rho=0.05)
        a, b = sample_network(p, 200, 7), sample_network(p, 200, 7)
        assert a.graph == b.graph
        assert np.array_equal(a.labels, b.labels) and np.array_equal(a.theta, b.theta)
        assert sample_network(p, 200, 8).graph != a.graph

    def test_empty_when_rho_zero(self):
        net = sample_network(_params(rho=0.0), 50, 1)
        assert net.graph.total_degree == 0

    def test_complete_with_loops(self):
        net = sample_network(_params(rho=1.0, pi=(1.0,), P=[[1.0]]), 12, 1)
        assert net.graph.num_loops == 12
        assert net.graph.total_degree == 12 * 12

    def test_mean_degree(self):
        lam, n = 125, 1000
        rho = rho_for_expected_degree(lam, n, [0.5, 0.5], P_ASSORT)
        p = _params(rho=rho)
        means = np.array([sample_network(p, n, s).graph.degree.mean() for s in range(20)])
        se = means.std(ddof=1) / np.sqrt(means.size)
        assert abs(means.mean() - lam) <= 3 * se

    def test_edge_frequencies_per_cell(self):
        n, reps = 16, 3000
        p = _params(ThetaSpec.two_point(3), rho=0.1)
        rng = make_rng(21)
        labels = np.arange(n) % 2
        theta = np.where(np.arange(n) % 4 < 2, 0.5, 1.5)
        hits = np.zeros((n, n))
        for _ in range(reps):
            g, clamped = sample_graph_given(labels, theta, p, rng)
            assert clamped == 0
            hits += g.to_dense()
        expected = np.outer(theta, theta) * p.rho * p.P[np.ix_(labels, labels)]
        cells = {}
        for i in range(n):
            for j in range(i, n):
                key = (labels[i], labels[j], theta[i], theta[j])
                cells.setdefault(key, []).append(hits[i, j])
        for key, vals in cells.items():
            c_i, c_j, t_i, t_j = key
            q = t_i * t_j * p.rho * p.P[c_i, c_j]
            trials = reps * len(vals)
            se = np.sqrt(q * (1 - q) / trials)
            assert abs(sum(vals) / trials - q) <= 4 * se, key
        assert np.allclose(expected, expected.T)

    def test_clamping_counts(self, caplog):
        # validate() rules this out; build the parameters directly to exercise the guard
        p = DcbmParams(pi=np.array([1.0]), P=np.array([[1.0]]), rho=1.0, theta=ThetaSpec.two_point(3))
        g, clamped = sample_graph_given(np.zeros(4, int), np.array([1.5, 1.5, 0.5, 0.5]), p, make_rng(0))
        assert "clamped 3" in caplog.text
        # pairs among the two 1.5 nodes (including loops) exceed one
        assert clamped == 3
        assert g.num_edges >= 3


class TestPopulationQuantities:
    def test_counterexample(self):
        p = _params(ThetaSpec.two_point(4), rho=1.0, P=[[0.1, 0.05], [0.05, 0.1]])
        q = population_quantities(p)
        assert q.pi_tilde == pytest.approx([0.5, 0.5])
        assert q.P0 == pytest.approx(0.075, abs=1e-15)
        assert q.P0_tilde == pytest.approx(0.075, abs=1e-15)
        assert q.W_tilde.sum() == pytest.approx(1.0)

    def test_continuous_mixture_rejected(self):
        with pytest.raises(ParameterError):
            population_quantities(_params(ThetaSpec.mixture(2, 0.5), rho=0.01))


class TestParamFiles:
    def test_round_trip(self):
        for theta in (ThetaSpec.constant(), ThetaSpec.two_point(4), ThetaSpec.mixture(3, 0.25),
                      ThetaSpec("discrete", values=(0.5, 1.5), probs=(0.5, 0.5))):
            p = _params(theta, rho=0.0123)
            q, _ = parse_params(format_params(p))
            assert q == p

    def test_lambda(self):
        text = "K = 2\npi = 0.5 0.5\nP = 4 1 1 4\nlambda = 125\nn = 1000\n"
        p, extras = parse_params(text)
        assert p.rho == pytest.approx(0.05) and extras["n"] == 1000
        with pytest.raises(ParameterError, match="n"):
            parse_params("pi = 1\nP = 1\nlambda = 3\n")

    @pytest.mark.parametrize("text", ["pi = 0.5 0.5\n", "K = 3\npi = 0.5 0.5\nP = 1 0 0 1\n",
                                      "pi = 1\nP = 1\nrho = 0.1\nlambda = 2\nn = 5\n"])
    def test_errors(self, text):
        with pytest.raises(ParameterError):
            parse_params(text)
