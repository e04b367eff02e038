#include <dropstyle/errors.hpp>
#include <dropstyle/mesh.hpp>

#include <spdlog/spdlog.h>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>

namespace dropstyle
{
	void SurfaceMesh::validate() const
	{
		const int n = static_cast<int>(vertices.size());
		for (std::size_t f = 0; f < faces.size(); ++f)
		{
			const Face &face = faces[f];
			for (int k = 0; k < 3; ++k)
				if (face[k] < 0 || face[k] >= n)
					throw TopologyError("face " + std::to_string(f) + " references vertex " + std::to_string(face[k]) + " of " + std::to_string(n));
			if (face[0] == face[1] || face[1] == face[2] || face[0] == face[2])
				throw TopologyError("face " + std::to_string(f) + " is degenerate");
		}
		if (!colors.empty() && colors.size() != vertices.size())
			throw LengthMismatch("color count " + std::to_string(colors.size()) + " != vertex count " + std::to_string(n));
	}

	MeshFormat format_from_path(const std::filesystem::path &path)
	{
		std::string ext = path.extension().string();
		std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
		if (ext == ".obj")
			return MeshFormat::obj;
		if (ext == ".ply")
			return MeshFormat::ply;
		throw ParseError("cannot infer mesh format from '" + path.string() + "' (expected .obj or .ply)");
	}

	// ------------------------------------------------------------------ OBJ

	namespace
	{
		std::vector<std::string_view> split_ws(std::string_view line)
		{
			std::vector<std::string_view> out;
			std::size_t i = 0;
			while (i < line.size())
			{
				while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
					++i;
				std::size_t j = i;
				while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j])))
					++j;
				if (j > i)
					out.push_back(line.substr(i, j - i));
				i = j;
			}
			return out;
		}

		double parse_double(std::string_view tok, std::size_t line_no)
		{
			// from_chars for double is unavailable on some standard libraries; strtod is fine here
			std::string s(tok);
			char *end = nullptr;
			const double v = std::strtod(s.c_str(), &end);
			if (end != s.c_str() + s.size() || !std::isfinite(v))
				throw ParseError("line " + std::to_string(line_no) + ": bad number '" + s + "'");
			return v;
		}

		long parse_long(std::string_view tok, std::size_t line_no)
		{
			long v = 0;
			const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
			if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
				throw ParseError("line " + std::to_string(line_no) + ": bad integer '" + std::string(tok) + "'");
			return v;
		}
	} // namespace

	SurfaceMesh read_obj(std::istream &in)
	{
		SurfaceMesh mesh;
		bool any_color = false, any_plain = false;
		std::string line;
		std::size_t line_no = 0;
		while (std::getline(in, line))
		{
			++line_no;
			const auto hash = line.find('#');
			if (hash != std::string::npos)
				line.resize(hash);
			const auto tok = split_ws(line);
			if (tok.empty())
				continue;
			if (tok[0] == "v")
			{
				if (tok.size() != 4 && tok.size() != 7)
					throw ParseError("line " + std::to_string(line_no) + ": vertex needs 3 or 6 values");
				mesh.vertices.emplace_back(parse_double(tok[1], line_no), parse_double(tok[2], line_no), parse_double(tok[3], line_no));
				if (tok.size() == 7)
				{
					mesh.colors.emplace_back(parse_double(tok[4], line_no), parse_double(tok[5], line_no), parse_double(tok[6], line_no));
					any_color = true;
				}
				else
				{
					mesh.colors.emplace_back(Vec3::Zero());
					any_plain = true;
				}
			}
			else if (tok[0] == "f")
			{
				if (tok.size() < 4)
					throw ParseError("line " + std::to_string(line_no) + ": face needs at least 3 vertices");
				std::vector<int> poly;
				for (std::size_t k = 1; k < tok.size(); ++k)
				{
					const auto slash = tok[k].find('/');
					long idx = parse_long(tok[k].substr(0, slash), line_no);
					if (idx < 0)
						idx = static_cast<long>(mesh.vertices.size()) + idx + 1;
					if (idx == 0)
						throw ParseError("line " + std::to_string(line_no) + ": OBJ indices are 1-based");
					poly.push_back(static_cast<int>(idx - 1));
				}
				for (std::size_t k = 1; k + 1 < poly.size(); ++k)
					mesh.faces.push_back({poly[0], poly[k], poly[k + 1]});
			}
			// vn, vt, o, g, s, usemtl, mtllib: ignored
		}
		if (!any_color)
			mesh.colors.clear();
		else if (any_plain)
			spdlog::warn("OBJ mixes colored and uncolored vertices; missing colors set to black");
		mesh.validate();
		return mesh;
	}

	void write_obj(const SurfaceMesh &mesh, std::ostream &out)
	{
		out << std::setprecision(std::numeric_limits<double>::max_digits10);
		for (std::size_t i = 0; i < mesh.vertices.size(); ++i)
		{
			const Vec3 &v = mesh.vertices[i];
			out << "v " << v.x() << ' ' << v.y() << ' ' << v.z();
			if (mesh.has_colors())
			{
				const Vec3 &c = mesh.colors[i];
				out << ' ' << c.x() << ' ' << c.y() << ' ' << c.z();
			}
			out << '\n';
		}
		for (const Face &f : mesh.faces)
			out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
	}

	// ------------------------------------------------------------------ PLY

	namespace
	{
		enum class PlyType
		{
			i8,
			u8,
			i16,
			u16,
			i32,
			u32,
			f32,
			f64
		};

		PlyType ply_type(std::string_view name)
		{
			if (name == "char" || name == "int8")
				return PlyType::i8;
			if (name == "uchar" || name == "uint8")
				return PlyType::u8;
			if (name == "short" || name == "int16")
				return PlyType::i16;
			if (name == "ushort" || name == "uint16")
				return PlyType::u16;
			if (name == "int" || name == "int32")
				return PlyType::i32;
			if (name == "uint" || name == "uint32")
				return PlyType::u32;
			if (name == "float" || name == "float32")
				return PlyType::f32;
			if (name == "double" || name == "float64")
				return PlyType::f64;
			throw ParseError("unknown PLY type '" + std::string(name) + "'");
		}

		struct PlyProperty
		{
			std::string name;
			PlyType type = PlyType::f32;
			bool is_list = false;
			PlyType count_type = PlyType::u8;
		};

		struct PlyElement
		{
			std::string name;
			std::size_t count = 0;
			std::vector<PlyProperty> props;
		};

		template <typename T>
		T read_le(std::istream &in)
		{
			static_assert(std::endian::native == std::endian::little, "big-endian hosts are not supported");
			T v;
			in.read(reinterpret_cast<char *>(&v), sizeof(T));
			if (!in)
				throw ParseError("unexpected end of binary PLY data");
			return v;
		}

		double read_binary_value(std::istream &in, PlyType t)
		{
			switch (t)
			{
			case PlyType::i8:
				return read_le<std::int8_t>(in);
			case PlyType::u8:
				return read_le<std::uint8_t>(in);
			case PlyType::i16:
				return read_le<std::int16_t>(in);
			case PlyType::u16:
				return read_le<std::uint16_t>(in);
			case PlyType::i32:
				return read_le<std::int32_t>(in);
			case PlyType::u32:
				return read_le<std::uint32_t>(in);
			case PlyType::f32:
				return read_le<float>(in);
			case PlyType::f64:
				return read_le<double>(in);
			}
			return 0.0;
		}

		bool is_integer(PlyType t) { return t != PlyType::f32 && t != PlyType::f64; }

		class PlyValueReader
		{
		public:
			PlyValueReader(std::istream &in, bool binary) : in_(in), binary_(binary) {}

			double next(PlyType t)
			{
				if (binary_)
					return read_binary_value(in_, t);
				std::string tok;
				if (!(in_ >> tok))
					throw ParseError("unexpected end of ASCII PLY data");
				return parse_double(tok, 0);
			}

		private:
			std::istream &in_;
			bool binary_;
		};
	} // namespace

	SurfaceMesh read_ply(std::istream &in)
	{
		std::string line;
		if (!std::getline(in, line) || line.rfind("ply", 0) != 0)
			throw ParseError("missing 'ply' magic");

		bool binary = false;
		std::vector<PlyElement> elements;
		bool header_done = false;
		while (std::getline(in, line))
		{
			if (!line.empty() && line.back() == '\r')
				line.pop_back();
			const auto tok = split_ws(line);
			if (tok.empty() || tok[0] == "comment" || tok[0] == "obj_info")
				continue;
			if (tok[0] == "format")
			{
				if (tok.size() < 2)
					throw ParseError("bad format line");
				if (tok[1] == "ascii")
					binary = false;
				else if (tok[1] == "binary_little_endian")
					binary = true;
				else
					throw ParseError("unsupported PLY encoding '" + std::string(tok[1]) + "'");
			}
			else if (tok[0] == "element")
			{
				if (tok.size() != 3)
					throw ParseError("bad element line");
				elements.push_back({std::string(tok[1]), static_cast<std::size_t>(parse_long(tok[2], 0)), {}});
			}
			else if (tok[0] == "property")
			{
				if (elements.empty())
					throw ParseError("property before element");
				PlyProperty prop;
				if (tok.size() == 5 && tok[1] == "list")
				{
					prop.is_list = true;
					prop.count_type = ply_type(tok[2]);
					prop.type = ply_type(tok[3]);
					prop.name = tok[4];
				}
				else if (tok.size() == 3)
				{
					prop.type = ply_type(tok[1]);
					prop.name = tok[2];
				}
				else
					throw ParseError("bad property line '" + line + "'");
				elements.back().props.push_back(prop);
			}
			else if (tok[0] == "end_header")
			{
				header_done = true;
				break;
			}
			else
				throw ParseError("unexpected header line '" + line + "'");
		}
		if (!header_done)
			throw ParseError("missing end_header");

		SurfaceMesh mesh;
		PlyValueReader reader(in, binary);
		for (const PlyElement &el : elements)
		{
			if (el.name == "vertex")
			{
				int ix = -1, iy = -1, iz = -1, ir = -1, ig = -1, ib = -1;
				for (std::size_t p = 0; p < el.props.size(); ++p)
				{
					const std::string &n = el.props[p].name;
					const int pi = static_cast<int>(p);
					if (n == "x")
						ix = pi;
					else if (n == "y")
						iy = pi;
					else if (n == "z")
						iz = pi;
					else if (n == "red" || n == "r")
						ir = pi;
					else if (n == "green" || n == "g")
						ig = pi;
					else if (n == "blue" || n == "b")
						ib = pi;
				}
				if (ix < 0 || iy < 0 || iz < 0)
					throw ParseError("vertex element lacks x/y/z");
				const bool colored = ir >= 0 && ig >= 0 && ib >= 0;
				mesh.vertices.resize(el.count);
				if (colored)
					mesh.colors.resize(el.count);
				std::vector<double> vals(el.props.size());
				for (std::size_t i = 0; i < el.count; ++i)
				{
					for (std::size_t p = 0; p < el.props.size(); ++p)
					{
						if (el.props[p].is_list)
						{
							const auto n = static_cast<std::size_t>(reader.next(el.props[p].count_type));
							for (std::size_t k = 0; k < n; ++k)
								reader.next(el.props[p].type);
							continue;
						}
						vals[p] = reader.next(el.props[p].type);
					}
					mesh.vertices[i] = {vals[ix], vals[iy], vals[iz]};
					if (colored)
					{
						// integer channels are 0..255, float channels are already in [0,1]
						const double s = is_integer(el.props[ir].type) ? 1.0 / 255.0 : 1.0;
						mesh.colors[i] = Vec3(vals[ir], vals[ig], vals[ib]) * s;
					}
				}
			}
			else if (el.name == "face")
			{
				for (std::size_t i = 0; i < el.count; ++i)
				{
					for (const PlyProperty &prop : el.props)
					{
						if (!prop.is_list)
						{
							reader.next(prop.type);
							continue;
						}
						const auto n = static_cast<std::size_t>(reader.next(prop.count_type));
						std::vector<int> poly(n);
						for (std::size_t k = 0; k < n; ++k)
							poly[k] = static_cast<int>(reader.next(prop.type));
						if (prop.name != "vertex_indices" && prop.name != "vertex_index")
							continue;
						if (n < 3)
							throw ParseError("face with fewer than 3 vertices");
						for (std::size_t k = 1; k + 1 < n; ++k)
							mesh.faces.push_back({poly[0], poly[k], poly[k + 1]});
					}
				}
			}
			else
			{
				for (std::size_t i = 0; i < el.count; ++i)
					for (const PlyProperty &prop : el.props)
					{
						const std::size_t n = prop.is_list ? static_cast<std::size_t>(reader.next(prop.count_type)) : 1;
						for (std::size_t k = 0; k < n; ++k)
							reader.next(prop.type);
					}
			}
		}
		mesh.validate();
		return mesh;
	}

	void write_ply(const SurfaceMesh &mesh, std::ostream &out, PlyEncoding encoding)
	{
		const bool binary = encoding == PlyEncoding::binary_little_endian;
		out << "ply\n"
			<< "format " << (binary ? "binary_little_endian" : "ascii") << " 1.0\n"
			<< "element vertex " << mesh.vertices.size() << '\n'
			<< "property double x\nproperty double y\nproperty double z\n";
		if (mesh.has_colors())
			out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
		out << "element face " << mesh.faces.size() << '\n'
			<< "property list uchar int vertex_indices\n"
			<< "end_header\n";

		auto channel = [](double c) {
			return static_cast<std::uint8_t>(std::lround(std::clamp(c, 0.0, 1.0) * 255.0));
		};
		if (binary)
		{
			auto put = [&](auto v) { out.write(reinterpret_cast<const char *>(&v), sizeof(v)); };
			for (std::size_t i = 0; i < mesh.vertices.size(); ++i)
			{
				for (int a = 0; a < 3; ++a)
					put(mesh.vertices[i][a]);
				if (mesh.has_colors())
					for (int a = 0; a < 3; ++a)
						put(channel(mesh.colors[i][a]));
			}
			for (const Face &f : mesh.faces)
			{
				put(std::uint8_t{3});
				for (int k = 0; k < 3; ++k)
					put(static_cast<std::int32_t>(f[k]));
			}
		}
		else
		{
			out << std::setprecision(std::numeric_limits<double>::max_digits10);
			for (std::size_t i = 0; i < mesh.vertices.size(); ++i)
			{
				const Vec3 &v = mesh.vertices[i];
				out << v.x() << ' ' << v.y() << ' ' << v.z();
				if (mesh.has_colors())
					for (int a = 0; a < 3; ++a)
						out << ' ' << int(channel(mesh.colors[i][a]));
				out << '\n';
			}
			for (const Face &f : mesh.faces)
				out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
		}
	}

	SurfaceMesh load_mesh(const std::filesystem::path &path, std::optional<MeshFormat> format)
	{
		const MeshFormat fmt = format ? *format : format_from_path(path);
		std::ifstream in(path, std::ios::binary);
		if (!in)
			throw IoError("cannot open '" + path.string() + "'");
		try
		{
			return fmt == MeshFormat::obj ? read_obj(in) : read_ply(in);
		}
		catch (const ParseError &e)
		{
			throw ParseError(path.string() + ": " + e.what());
		}
	}

	void save_colored_mesh(const SurfaceMesh &mesh, const std::filesystem::path &path,
						   std::optional<MeshFormat> format, PlyEncoding encoding)
	{
		mesh.validate();
		const MeshFormat fmt = format ? *format : format_from_path(path);
		std::ofstream out(path, std::ios::binary);
		if (!out)
			throw IoError("cannot write '" + path.string() + "'");
		if (fmt == MeshFormat::obj)
			write_obj(mesh, out);
		else
			write_ply(mesh, out, encoding);
		if (!out)
			throw IoError("write failed for '" + path.string() + "'");
	}

	SurfaceMesh scaled(SurfaceMesh mesh, double factor)
	{
		for (Vec3 &v : mesh.vertices)
			v *= factor;
		return mesh;
	}

	// ------------------------------------------------------------- geometry

	std::vector<Vec3> vertex_normals(const SurfaceMesh &mesh)
	{
		std::vector<Vec3> normals(mesh.vertices.size(), Vec3::Zero());
		for (const Face &f : mesh.faces)
		{
			// cross product magnitude is twice the area: area weighting for free
			const Vec3 n = (mesh.vertices[f[1]] - mesh.vertices[f[0]]).cross(mesh.vertices[f[2]] - mesh.vertices[f[0]]);
			for (int k = 0; k < 3; ++k)
				normals[f[k]] += n;
		}
		std::size_t degenerate = 0;
		for (Vec3 &n : normals)
		{
			const double len = n.norm();
			if (len > 0.0 && std::isfinite(len))
				n /= len;
			else
			{
				n = Vec3::UnitZ();
				++degenerate;
			}
		}
		if (degenerate > 0)
			spdlog::warn("{} vertices have no incident face area; using +z as their normal", degenerate);
		return normals;
	}

	double bbox_diagonal(const SurfaceMesh &mesh)
	{
		if (mesh.vertices.empty())
			throw EmptyMesh("bounding box of a mesh without vertices");
		return bounding_box(mesh.vertices).diagonal();
	}

	SurfaceMesh apply_displacement(const SurfaceMesh &mesh, const DisplacementField &d)
	{
		if (d.size() != mesh.num_vertices())
			throw LengthMismatch("displacement has " + std::to_string(d.size()) + " entries for " + std::to_string(mesh.num_vertices()) + " vertices");
		return apply_displacement(mesh, d, vertex_normals(mesh));
	}

	SurfaceMesh apply_displacement(const SurfaceMesh &mesh, const DisplacementField &d, std::span<const Vec3> normals)
	{
		if (d.size() != mesh.num_vertices() || normals.size() != mesh.num_vertices())
			throw LengthMismatch("displacement/normal count does not match vertex count");
		SurfaceMesh out = mesh;
		for (std::size_t i = 0; i < out.vertices.size(); ++i)
			if (d[i] != 0.0)
				out.vertices[i] += d[i] * normals[i];
		return out;
	}

	double enclosed_volume(const SurfaceMesh &mesh)
	{
		double vol = 0.0;
		for (const Face &f : mesh.faces)
			vol += mesh.vertices[f[0]].dot(mesh.vertices[f[1]].cross(mesh.vertices[f[2]]));
		return vol / 6.0;
	}
} // namespace dropstyle
