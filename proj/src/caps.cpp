#include "caps.hpp"

#include "rational.hpp"

#include <cstdlib>
#include <sstream>

namespace probelab {

static Caps make_default_caps()
{
    Caps c;
    if (const char *env = std::getenv("PROBELAB_CAPS"))
    {
        Caps parsed = c;
        // delayed so that set_caps_from_string can reuse the parse
        std::string spec(env);
        std::stringstream ss(spec);
        std::string item;
        while (std::getline(ss, item, ','))
        {
            auto eq = item.find('=');
            if (eq == std::string::npos)
                throw InputError("malformed PROBELAB_CAPS entry '" + item + "'");
            std::string key = item.substr(0, eq);
            long long val = std::stoll(item.substr(eq + 1));
            if (key == "enum_len")
                parsed.enum_len = static_cast<int>(val);
            else if (key == "path_len")
                parsed.path_len = static_cast<int>(val);
            else if (key == "cap_n")
                parsed.cap_n = static_cast<int>(val);
            else if (key == "seq_count")
                parsed.seq_count = val;
            else
                throw InputError("unknown PROBELAB_CAPS key '" + key + "'");
        }
        c = parsed;
    }
    return c;
}

Caps &caps()
{
    static Caps c = make_default_caps();
    return c;
}

void set_caps_from_string(const std::string &spec)
{
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ','))
    {
        if (item.empty())
            continue;
        auto eq = item.find('=');
        if (eq == std::string::npos)
            throw InputError("malformed caps entry '" + item + "'");
        std::string key = item.substr(0, eq);
        long long val;
        try
        {
            val = std::stoll(item.substr(eq + 1));
        }
        catch (const std::exception &)
        {
            throw InputError("malformed caps value in '" + item + "'");
        }
        if (key == "enum_len")
            caps().enum_len = static_cast<int>(val);
        else if (key == "path_len")
            caps().path_len = static_cast<int>(val);
        else if (key == "cap_n")
            caps().cap_n = static_cast<int>(val);
        else if (key == "seq_count")
            caps().seq_count = val;
        else
            throw InputError("unknown caps key '" + key + "'");
    }
}

} // namespace probelab
