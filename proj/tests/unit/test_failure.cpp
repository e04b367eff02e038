#include <doctest.h>

#include <dropstyle/errors.hpp>
#include <dropstyle/failure.hpp>

#include <algorithm>
#include <random>

using namespace dropstyle;

TEST_CASE("critical stress")
{
	const Material pla = material_lookup("pla");
	CHECK(critical_stress(pla, 0.2) == doctest::Approx(9.12e6).epsilon(1e-14));
	CHECK(critical_stress(pla, 1.0) == pla.yield_strength);
	CHECK_THROWS_AS(critical_stress(pla, 0.0), DomainError);
	CHECK_THROWS_AS(critical_stress(pla, 1.5), DomainError);
	const FailureCriterion fc = FailureCriterion::make(pla);
	CHECK(fc.safety_lambda == 0.2);
	CHECK(fc.sigma_c == critical_stress(pla, 0.2));
}

TEST_CASE("normalized stress")
{
	const std::vector<double> zero(5, 0.0);
	CHECK(normalized_stress(zero, 9.12e6) == NormalizedStress(5, 0.0));
	const std::vector<double> vm = {4.56e6, 9.12e6, 18.24e6};
	const NormalizedStress sn = normalized_stress(vm, 9.12e6);
	CHECK(sn[0] == doctest::Approx(0.5));
	CHECK(sn[1] == 1.0);
	CHECK(sn[2] == doctest::Approx(2.0));
	CHECK_THROWS_AS(normalized_stress(vm, 0.0), DomainError);

	// positive homogeneity
	std::vector<double> scaled = vm;
	for (double &x : scaled)
		x *= 3.7;
	const NormalizedStress s2 = normalized_stress(scaled, 9.12e6);
	for (std::size_t i = 0; i < vm.size(); ++i)
		CHECK(s2[i] == doctest::Approx(3.7 * sn[i]));
}

TEST_CASE("viability verdict")
{
	const Material pla = material_lookup("pla");
	CHECK(viability_verdict(std::vector<double>{1e6, 44e6, 3e6}, pla).viability == Viability::viable);
	const Verdict at = viability_verdict(std::vector<double>{1e6, 45.6e6, 45.6e6}, pla);
	CHECK(at.viability == Viability::broken);
	CHECK(at.max_stress == 45.6e6);
	CHECK(at.worst_vertex == 1);
	const Verdict z = viability_verdict(std::vector<double>(4, 0.0), pla);
	CHECK(z.viability == Viability::viable);
	CHECK(z.max_stress == 0.0);
	CHECK(z.worst_vertex == 0);
	CHECK(std::string(to_string(Viability::broken)) == "broken");
	CHECK(std::string(to_string(Viability::viable)) == "viable");
}

TEST_CASE("verdict is permutation invariant and agrees with the normalized field")
{
	const Material pla = material_lookup("pla");
	std::mt19937_64 rng(12);
	std::uniform_real_distribution<double> u(0.0, 60e6);
	for (int trial = 0; trial < 200; ++trial)
	{
		std::vector<double> vm(50);
		for (double &x : vm)
			x = u(rng);
		if (trial % 7 == 0)
			vm[trial % 50] = pla.yield_strength;
		const Verdict v = viability_verdict(vm, pla);
		std::vector<double> p = vm;
		std::shuffle(p.begin(), p.end(), rng);
		const Verdict w = viability_verdict(p, pla);
		CHECK(v.viability == w.viability);
		CHECK(v.max_stress == w.max_stress);

		for (double lambda : {0.2, 0.5, 1.0})
		{
			const NormalizedStress sn = normalized_stress(vm, critical_stress(pla, lambda));
			const double top = *std::max_element(sn.begin(), sn.end());
			CHECK((v.viability == Viability::broken) == (top * lambda >= 1.0 - 1e-12));
		}
	}
}
