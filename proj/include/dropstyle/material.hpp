#pragma once

#include <json.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <string>

namespace dropstyle
{
	struct LameParameters
	{
		double lambda; ///< first Lame parameter, Pa
		double mu;     ///< shear modulus, Pa
	};

	/// lambda = E nu / ((1 + nu)(1 - 2 nu)), mu = E / (2 (1 + nu)).
	LameParameters lame_from_elastic(double young_modulus, double poisson_ratio);

	struct Material
	{
		std::string name;
		double young_modulus = 0.0;  ///< Pa
		double poisson_ratio = 0.0;
		double yield_strength = 0.0; ///< Pa
		double density = 0.0;        ///< kg/m^3
		double lame_lambda = 0.0;    ///< Pa
		double lame_mu = 0.0;        ///< Pa

		/// Fills the Lame constants and checks the physical ranges.
		static Material make(std::string name, double young_modulus, double poisson_ratio, double yield_strength, double density);
	};

	/// name -> material, as stored in materials.json.
	class MaterialDatabase
	{
	public:
		/// Built-in defaults (PLA).
		static MaterialDatabase builtin();
		static MaterialDatabase from_json(const nlohmann::json &j);
		static MaterialDatabase from_file(const std::filesystem::path &path);

		nlohmann::json to_json() const;

		/// Adds or replaces entries from `other`.
		void merge(const MaterialDatabase &other);

		/// Lookup is case-insensitive. Throws UnknownMaterial.
		const Material &lookup(const std::string &name) const;

		const std::map<std::string, Material> &entries() const { return entries_; }

		static constexpr int schema_version = 1;

	private:
		std::map<std::string, Material> entries_;
	};

	/// Built-in database, optionally extended by a user file.
	Material material_lookup(const std::string &name, const std::optional<std::filesystem::path> &user_file = std::nullopt);
} // namespace dropstyle
