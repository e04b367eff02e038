#include <dropstyle/errors.hpp>
#include <dropstyle/material.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>

namespace dropstyle
{
	LameParameters lame_from_elastic(double young_modulus, double poisson_ratio)
	{
		if (!(poisson_ratio < 0.5))
			throw IncompressibleError("Poisson ratio " + std::to_string(poisson_ratio) + " >= 0.5");
		if (!(young_modulus > 0.0) || !(poisson_ratio >= 0.0) || !std::isfinite(young_modulus))
			throw DomainError("need E > 0 and 0 <= nu < 0.5");
		const double nu = poisson_ratio, e = young_modulus;
		return {e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu)), e / (2.0 * (1.0 + nu))};
	}

	Material Material::make(std::string name, double young_modulus, double poisson_ratio, double yield_strength, double density)
	{
		const LameParameters lame = lame_from_elastic(young_modulus, poisson_ratio);
		if (!(yield_strength > 0.0) || !(density > 0.0))
			throw DomainError("material '" + name + "' needs positive yield strength and density");
		return {std::move(name), young_modulus, poisson_ratio, yield_strength, density, lame.lambda, lame.mu};
	}

	namespace
	{
		std::string lower(std::string s)
		{
			std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
			return s;
		}
	} // namespace

	MaterialDatabase MaterialDatabase::builtin()
	{
		// Yield strength of PLA is the 45.6 MPa used for the failure verdict.
		// E, nu and density are datasheet values, overridable via materials.json.
		MaterialDatabase db;
		db.entries_.emplace("pla", Material::make("pla", 3.5e9, 0.35, 45.6e6, 1240.0));
		return db;
	}

	MaterialDatabase MaterialDatabase::from_json(const nlohmann::json &j)
	{
		MaterialDatabase db;
		try
		{
			const int version = j.value("version", schema_version);
			if (version != schema_version)
				throw ConfigError("materials file version " + std::to_string(version) + " is not supported");
			for (const auto &[name, m] : j.at("materials").items())
				db.entries_.insert_or_assign(lower(name), Material::make(lower(name), m.at("E").get<double>(), m.at("nu").get<double>(),
																		 m.at("yield").get<double>(), m.at("density").get<double>()));
		}
		catch (const nlohmann::json::exception &e)
		{
			throw ConfigError(std::string("malformed materials JSON: ") + e.what());
		}
		return db;
	}

	MaterialDatabase MaterialDatabase::from_file(const std::filesystem::path &path)
	{
		std::ifstream in(path);
		if (!in)
			throw IoError("cannot open '" + path.string() + "'");
		nlohmann::json j;
		try
		{
			in >> j;
		}
		catch (const nlohmann::json::exception &e)
		{
			throw ParseError(path.string() + ": " + e.what());
		}
		return from_json(j);
	}

	nlohmann::json MaterialDatabase::to_json() const
	{
		nlohmann::json j;
		j["version"] = schema_version;
		j["materials"] = nlohmann::json::object();
		for (const auto &[name, m] : entries_)
			j["materials"][name] = {{"E", m.young_modulus}, {"nu", m.poisson_ratio}, {"yield", m.yield_strength}, {"density", m.density}};
		return j;
	}

	void MaterialDatabase::merge(const MaterialDatabase &other)
	{
		for (const auto &[name, m] : other.entries_)
			entries_.insert_or_assign(name, m);
	}

	const Material &MaterialDatabase::lookup(const std::string &name) const
	{
		const auto it = entries_.find(lower(name));
		if (it == entries_.end())
			throw UnknownMaterial("unknown material '" + name + "'");
		return it->second;
	}

	Material material_lookup(const std::string &name, const std::optional<std::filesystem::path> &user_file)
	{
		MaterialDatabase db = MaterialDatabase::builtin();
		if (user_file)
			db.merge(MaterialDatabase::from_file(*user_file));
		return db.lookup(name);
	}
} // namespace dropstyle
