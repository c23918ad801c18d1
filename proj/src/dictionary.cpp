#include "lsksvd/dictionary.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace lsksvd {

bool Dictionary::well_formed() const {
    if (atoms.cols() < 1 || atoms.rows() < 1) return false;
    for (Eigen::Index j = 0; j < atoms.cols(); ++j) {
        const double n = atoms.col(j).norm();
        if (std::abs(n - 1.0) > 1e-9) return false;
    }
    return true;
}

void save_dictionary(const std::string& path, const Dictionary& dict,
                     const std::string& config_echo) {
    nlohmann::json doc;
    doc["format"] = "lsksvd-dict";
    doc["version"] = 1;
    doc["patch_size"] = dict.patch_size;
    doc["channels"] = dict.channels;
    doc["k"] = dict.k();
    doc["K"] = dict.atom_count();
    nlohmann::json atoms = nlohmann::json::array();
    for (Eigen::Index j = 0; j < dict.atoms.cols(); ++j) {
        nlohmann::json atom = nlohmann::json::array();
        for (Eigen::Index i = 0; i < dict.atoms.rows(); ++i) {
            atom.push_back(dict.atoms(i, j));
        }
        atoms.push_back(std::move(atom));
    }
    doc["atoms"] = std::move(atoms);
    if (!config_echo.empty()) doc["train_config"] = config_echo;

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << doc.dump(1) << "\n";
    if (!out) throw std::runtime_error("failed to write dictionary '" + path + "'");
}

Dictionary load_dictionary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open dictionary '" + path + "'");
    nlohmann::json doc;
    in >> doc;
    if (doc.value("format", "") != std::string("lsksvd-dict")) {
        throw std::runtime_error("'" + path + "' is not an lsksvd-dict file");
    }
    if (doc.value("version", 0) != 1) {
        throw std::runtime_error("unsupported dictionary version in '" + path + "'");
    }
    Dictionary dict;
    dict.patch_size = doc.at("patch_size").get<int>();
    dict.channels = doc.at("channels").get<int>();
    const int k = doc.at("k").get<int>();
    const int atom_count = doc.at("K").get<int>();
    const auto& atoms = doc.at("atoms");
    if (static_cast<int>(atoms.size()) != atom_count) {
        throw std::runtime_error("atom count mismatch in '" + path + "'");
    }
    dict.atoms.resize(k, atom_count);
    for (int j = 0; j < atom_count; ++j) {
        const auto& atom = atoms.at(j);
        if (static_cast<int>(atom.size()) != k) {
            throw std::runtime_error("atom dimension mismatch in '" + path + "'");
        }
        for (int i = 0; i < k; ++i) dict.atoms(i, j) = atom.at(i).get<double>();
    }
    return dict;
}

} // namespace lsksvd
