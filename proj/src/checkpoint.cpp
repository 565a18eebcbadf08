#include "sgb/checkpoint.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

#include "sgb/fileio.hpp"

namespace sgb {

namespace {

constexpr const char* kHeader = "sgb-checkpoint v1";

std::string hexfloat(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%a", v);
    return buf;
}

}  // namespace

const TensorPtr& Checkpoint::find(const std::string& name) const {
    for (const auto& [n, t] : params) {
        if (n == name) return t;
    }
    throw std::runtime_error("checkpoint: no parameter named '" + name + "'");
}

void save_checkpoint(const std::string& path, const std::string& meta, const NamedParams& params) {
    if (meta.find('\n') != std::string::npos) {
        throw std::invalid_argument("checkpoint meta must be a single line");
    }
    std::ostringstream out;
    out << kHeader << "\n";
    out << "meta " << meta << "\n";
    for (const auto& [name, t] : params) {
        out << "param " << name << " " << t->rank();
        for (std::size_t e : t->shape) out << " " << e;
        out << "\n";
        for (std::size_t i = 0; i < t->numel(); ++i) {
            if (i) out << " ";
            out << hexfloat(t->data[i]);
        }
        out << "\n";
    }
    out << "end\n";
    atomic_write_file(path, out.str());
}

Checkpoint load_checkpoint(const std::string& path) {
    std::istringstream in(read_text_file(path));
    std::string line;
    if (!std::getline(in, line) || line != kHeader) {
        throw std::runtime_error("checkpoint: bad or missing header in " + path);
    }
    Checkpoint ckpt;
    if (!std::getline(in, line) || line.rfind("meta ", 0) != 0) {
        throw std::runtime_error("checkpoint: missing meta line in " + path);
    }
    ckpt.meta = line.substr(5);
    while (std::getline(in, line)) {
        if (line == "end") return ckpt;
        std::istringstream head(line);
        std::string tag, name;
        std::size_t rank = 0;
        head >> tag >> name >> rank;
        if (tag != "param" || !head) {
            throw std::runtime_error("checkpoint: malformed entry '" + line + "'");
        }
        Shape shape(rank);
        for (std::size_t i = 0; i < rank; ++i) {
            if (!(head >> shape[i])) throw std::runtime_error("checkpoint: bad shape for " + name);
        }
        std::string values;
        if (!std::getline(in, values)) throw std::runtime_error("checkpoint: missing values for " + name);
        std::vector<double> data;
        data.reserve(shape_numel(shape));
        const char* p = values.c_str();
        char* endp = nullptr;
        for (std::size_t i = 0; i < shape_numel(shape); ++i) {
            const double v = std::strtod(p, &endp);
            if (endp == p) throw std::runtime_error("checkpoint: short value row for " + name);
            data.push_back(v);
            p = endp;
        }
        ckpt.params.emplace_back(name, Tensor::of(shape, std::move(data)));
    }
    throw std::runtime_error("checkpoint: truncated file " + path);
}

void restore_params(const Checkpoint& ckpt, const NamedParams& params) {
    for (const auto& [name, t] : params) {
        const TensorPtr& src = ckpt.find(name);
        if (src->shape != t->shape) {
            throw std::runtime_error("checkpoint: shape mismatch for '" + name + "': file has " +
                                     shape_to_string(src->shape) + ", model has " +
                                     shape_to_string(t->shape));
        }
        t->data = src->data;
    }
}

}  // namespace sgb
