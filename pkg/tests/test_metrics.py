"""Divergence, entropy, and proxy reconstruction error."""

import numpy as np
import pytest

from tbmlearn import (
    EmpiricalDistribution,
    FitConfig,
    TransactionDataset,
    entropy,
    evaluate_gibbs,
    fit,
    fit_to_moments,
    kl_divergence,
    mine_parameter_domain,
    reconstruction_error_proxy,
)
from tbmlearn.fitting import empirical_targets
from tbmlearn.model import build_sample_space, incidence_matrix

from conftest import WORKED_ENTROPY, WORKED_KL
from oracles import random_dataset

TIGHT = FitConfig(tol=1e-10, max_sweeps=200_000)


class TestKlDivergence:
    def test_identity_is_zero(self, worked_dataset):
        p_hat = EmpiricalDistribution.from_dataset(worked_dataset)
        assert kl_divergence(p_hat, dict(p_hat.probs)) == 0.0

    def test_worked_example(self, worked_dataset):
        model, _ = fit(worked_dataset, [(1,), (2,)], TIGHT)
        p_hat = EmpiricalDistribution.from_dataset(worked_dataset)
        assert kl_divergence(p_hat, model) == pytest.approx(WORKED_KL, abs=1e-9)

    def test_point_mass_against_uniform(self):
        p_hat = {(1,): 1.0}
        q = {x: 0.25 for x in [(), (1,), (2,), (1, 2)]}
        assert kl_divergence(p_hat, q) == pytest.approx(np.log(4), abs=1e-12)

    def test_zero_model_probability_names_pattern(self):
        with pytest.raises(ValueError, match=r"\(1, 2\)"):
            kl_divergence({(1, 2): 1.0}, {(1, 2): 0.0})
        with pytest.raises(ValueError, match=r"\(1, 2\)"):
            kl_divergence({(1, 2): 1.0}, {(): 1.0})

    def test_nonnegativity(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            p = rng.dirichlet(np.ones(6))
            q = rng.dirichlet(np.ones(6))
            keys = [(i,) for i in range(6)]
            assert kl_divergence(dict(zip(keys, p)), dict(zip(keys, q))) >= 0.0


class TestEntropy:
    def test_point_mass(self):
        assert entropy({(1,): 1.0}) == 0.0

    def test_uniform(self):
        p = {(i,): 0.2 for i in range(5)}
        assert entropy(p) == pytest.approx(np.log(5), abs=1e-12)

    def test_worked_empirical(self, worked_dataset):
        p_hat = EmpiricalDistribution.from_dataset(worked_dataset)
        assert entropy(p_hat) == pytest.approx(WORKED_ENTROPY, abs=1e-12)

    def test_rejects_unnormalized(self):
        with pytest.raises(ValueError):
            entropy({(1,): 0.4})


class TestReconstructionErrorProxy:
    def test_constant_energies_reduce_to_entropy_defect(self, worked_dataset):
        error = reconstruction_error_proxy(lambda x: 1.25, worked_dataset)
        expected = np.log(len(worked_dataset.entries)) - WORKED_ENTROPY
        assert error == pytest.approx(expected, abs=1e-12)

    def test_matches_exact_kl_for_transductive_model(self, worked_dataset):
        model, _ = fit(worked_dataset, [(1,), (2,)], TIGHT)
        p_hat = EmpiricalDistribution.from_dataset(worked_dataset)
        direct = kl_divergence(p_hat, model)
        proxy = reconstruction_error_proxy(model.energy, worked_dataset)
        assert proxy == pytest.approx(direct, abs=1e-10)

    def test_invariant_to_constant_energy_shift(self, worked_dataset):
        model, _ = fit(worked_dataset, [(1,), (2,)], TIGHT)
        shifted = lambda x: model.energy(x) + 17.0
        assert reconstruction_error_proxy(
            shifted, worked_dataset
        ) == pytest.approx(
            reconstruction_error_proxy(model.energy, worked_dataset), abs=1e-10
        )

    def test_nonfinite_energy_rejected(self, worked_dataset):
        with pytest.raises(ValueError):
            reconstruction_error_proxy(lambda x: np.inf, worked_dataset)


class TestLikelihoodRelation:
    def test_kl_equals_negative_loglik_rate_minus_entropy(self):
        rng = np.random.default_rng(4)
        for _ in range(8):
            n = int(rng.integers(2, 6))
            entries = random_dataset(rng, n, int(rng.integers(40, 250)))
            d = TransactionDataset(entries=entries, n_variables=n)
            model, report = fit(d, mine_parameter_domain(d, 0.2, 2), TIGHT)
            p_hat = EmpiricalDistribution.from_dataset(d)
            kl = kl_divergence(p_hat, model)
            relation = -model.log_likelihood(d) / d.n_samples - entropy(p_hat)
            assert kl == pytest.approx(relation, abs=1e-9)

    def test_evaluate_gibbs_fields(self, worked_dataset):
        model, _ = fit(worked_dataset, [(1,), (2,)], TIGHT)
        ev = evaluate_gibbs(model, worked_dataset)
        assert ev.kl == pytest.approx(WORKED_KL, abs=1e-9)
        assert ev.n_eval_patterns == 4
        assert ev.log_likelihood == pytest.approx(
            -worked_dataset.n_samples * (ev.kl + WORKED_ENTROPY), abs=1e-7
        )


class TestNestedDomainMonotonicity:
    def test_larger_domain_never_fits_worse_on_same_space(self):
        rng = np.random.default_rng(6)
        for _ in range(8):
            n = int(rng.integers(2, 6))
            entries = random_dataset(rng, n, int(rng.integers(60, 300)))
            d = TransactionDataset(entries=entries, n_variables=n)
            big = sorted(mine_parameter_domain(d, 0.1, 2))
            if len(big) < 2:
                continue
            small = [p for p in big if len(p) == 1]
            space = build_sample_space(big, d)
            z_big = incidence_matrix(space, big)
            m_big, _ = fit_to_moments(
                space, big, empirical_targets(d, space, z_big), TIGHT, incidence=z_big
            )
            z_small = incidence_matrix(space, small)
            m_small, _ = fit_to_moments(
                space,
                small,
                empirical_targets(d, space, z_small),
                TIGHT,
                incidence=z_small,
            )
            p_hat = EmpiricalDistribution.from_dataset(d)
            assert kl_divergence(p_hat, m_big) <= kl_divergence(p_hat, m_small) + 1e-8
