#pragma once

// Curated rank facts that search cannot establish (upper bounds, exact
// ranks). The table is a flat text file:
//
//   # comment
//   <D> <claimed_rank> <citation tag ...>
//
// Everything after the rank up to the end of the line is the citation.

#include <cctype>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "csk3/numtheory.hpp"

namespace csk3 {

struct ExternalFact {
    Integer D;
    int claimed_rank = 0;
    std::string citation;
};

class ExternalFactTable {
public:
    static ExternalFactTable parse(std::istream& in) {
        ExternalFactTable table;
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            std::istringstream ls(line);
            std::string d_text;
            if (!(ls >> d_text)) continue;
            ExternalFact fact;
            if (fact.D.set_str(d_text, 10) != 0 || !(ls >> fact.claimed_rank) || fact.claimed_rank < 0)
                throw InvalidArgument("external fact table line " + std::to_string(lineno) + " is malformed");
            std::getline(ls >> std::ws, fact.citation);
            while (!fact.citation.empty() && std::isspace(static_cast<unsigned char>(fact.citation.back())))
                fact.citation.pop_back();
            if (fact.citation.empty())
                throw InvalidArgument("external fact table line " + std::to_string(lineno) + " has no citation");
            if (!is_squarefree(fact.D) || fact.D <= 0)
                throw InvalidArgument("external fact table line " + std::to_string(lineno) + ": D must be squarefree");
            table.facts_[fact.D] = fact;
        }
        return table;
    }

    static ExternalFactTable load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw Error("cannot open external fact table " + path);
        return parse(in);
    }

    std::optional<ExternalFact> lookup(const Integer& D) const {
        auto it = facts_.find(D);
        if (it == facts_.end()) return std::nullopt;
        return it->second;
    }

    std::size_t size() const { return facts_.size(); }

private:
    struct Less {
        bool operator()(const Integer& a, const Integer& b) const { return a < b; }
    };
    std::map<Integer, ExternalFact, Less> facts_;
};

}  // namespace csk3
