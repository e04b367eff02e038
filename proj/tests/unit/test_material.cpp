#include <doctest.h>

#include <dropstyle/errors.hpp>
#include <dropstyle/material.hpp>
#include <testing.hpp>

#include <random>

using namespace dropstyle;

TEST_CASE("lame parameters")
{
	const LameParameters a = lame_from_elastic(1.0, 0.0);
	CHECK(a.lambda == 0.0);
	CHECK(a.mu == doctest::Approx(0.5));
	const LameParameters b = lame_from_elastic(3.0, 0.25);
	CHECK(b.lambda == doctest::Approx(1.2).epsilon(1e-14));
	CHECK(b.mu == doctest::Approx(1.2).epsilon(1e-14));
	CHECK_THROWS_AS(lame_from_elastic(1.0, 0.5), IncompressibleError);
	CHECK_THROWS_AS(lame_from_elastic(1.0, 0.7), IncompressibleError);
	CHECK_THROWS_AS(lame_from_elastic(0.0, 0.3), DomainError);
	CHECK_THROWS_AS(lame_from_elastic(1.0, -0.1), DomainError);
}

TEST_CASE("E and nu are recovered from the Lame pair")
{
	std::mt19937_64 rng(6);
	std::uniform_real_distribution<double> loge(3.0, 11.0), nu(0.0, 0.499);
	for (int i = 0; i < 1000; ++i)
	{
		const double e = std::pow(10.0, loge(rng)), n = nu(rng);
		const LameParameters l = lame_from_elastic(e, n);
		CHECK(l.mu * (3 * l.lambda + 2 * l.mu) / (l.lambda + l.mu) == doctest::Approx(e).epsilon(1e-10));
		CHECK(l.lambda / (2 * (l.lambda + l.mu)) == doctest::Approx(n).epsilon(1e-10));
	}
}

TEST_CASE("builtin PLA")
{
	const Material pla = material_lookup("pla");
	CHECK(pla.yield_strength == 45.6e6);
	CHECK(pla.young_modulus == 3.5e9);
	CHECK(pla.poisson_ratio == 0.35);
	CHECK(pla.density == 1240.0);
	const LameParameters l = lame_from_elastic(pla.young_modulus, pla.poisson_ratio);
	CHECK(pla.lame_lambda == l.lambda);
	CHECK(pla.lame_mu == l.mu);
	CHECK(material_lookup("PLA").name == "pla");
	CHECK_THROWS_AS(material_lookup("unobtainium"), UnknownMaterial);
}

TEST_CASE("shipped materials file matches the builtin table")
{
	const MaterialDatabase file = MaterialDatabase::from_file(test::source_path("data/materials.json"));
	CHECK(file.to_json() == MaterialDatabase::builtin().to_json());
}

TEST_CASE("user materials extend and override")
{
	const auto dir = test::scratch_dir("materials");
	const auto path = test::write_text(dir / "m.json", R"({"version": 1, "materials": {
		"Steel": {"E": 200e9, "nu": 0.3, "yield": 250e6, "density": 7850},
		"pla": {"E": 3.0e9, "nu": 0.36, "yield": 50e6, "density": 1250}}})");
	const Material steel = material_lookup("steel", path);
	CHECK(steel.young_modulus == 200e9);
	CHECK(material_lookup("pla", path).yield_strength == 50e6);

	const MaterialDatabase db = MaterialDatabase::from_file(path);
	CHECK(MaterialDatabase::from_json(db.to_json()).to_json() == db.to_json());

	CHECK_THROWS_AS(MaterialDatabase::from_file(test::write_text(dir / "v.json", R"({"version": 9, "materials": {}})")), ConfigError);
	CHECK_THROWS_AS(MaterialDatabase::from_file(test::write_text(dir / "k.json", R"({"version": 1, "materials": {"x": {"E": 1}}})")), ConfigError);
	CHECK_THROWS_AS(MaterialDatabase::from_file(test::write_text(dir / "b.json", "{not json")), ParseError);
	CHECK_THROWS_AS(MaterialDatabase::from_file(test::write_text(dir / "n.json", R"({"version": 1, "materials": {"x": {"E": 1e9, "nu": 0.5, "yield": 1, "density": 1}}})")), IncompressibleError);
	CHECK_THROWS_AS(MaterialDatabase::from_file(dir / "missing.json"), IoError);
}

TEST_CASE("material validation")
{
	CHECK_THROWS_AS(Material::make("x", 1e9, 0.3, 0.0, 1000.0), DomainError);
	CHECK_THROWS_AS(Material::make("x", 1e9, 0.3, 1e6, -1.0), DomainError);
	CHECK_THROWS_AS(Material::make("x", -1e9, 0.3, 1e6, 1000.0), DomainError);
}
