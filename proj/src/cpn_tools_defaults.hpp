#pragma once

// Attribute defaults of a CPN Tools 4.0.1 document (format 6), as written by
// the tool itself for a fresh place, transition and arc.

namespace smd2cpn::cpn_tools {

inline constexpr const char* kHeader =
    "<?xml version=\"1.0\" encoding=\"iso-8859-1\"?>\n"
    "<!DOCTYPE workspaceElements PUBLIC \"-//CPN//DTD CPNXML 1.0//EN\" "
    "\"http://cpntools.org/DTD/6/cpn.dtd\">\n\n";
inline constexpr const char* kGenerator = "<generator tool=\"CPN Tools\" version=\"4.0.1\" format=\"6\"/>";
inline constexpr const char* kToolAttrs = "tool=\"CPN Tools\" version=\"4.0.1\"";

inline constexpr const char* kNodeFill = "<fillattr colour=\"White\" pattern=\"\" filled=\"false\"/>";
inline constexpr const char* kNodeLine = "<lineattr colour=\"Black\" thick=\"1\" type=\"Solid\"/>";
inline constexpr const char* kText = "<textattr colour=\"Black\" bold=\"false\"/>";
inline constexpr const char* kAnnotFill = "<fillattr colour=\"White\" pattern=\"Solid\" filled=\"false\"/>";
inline constexpr const char* kAnnotLine = "<lineattr colour=\"Black\" thick=\"0\" type=\"Solid\"/>";
inline constexpr const char* kArrow = "<arrowattr headsize=\"1.200000\" currentcyckle=\"2\"/>";
inline constexpr const char* kEllipse = "<ellipse w=\"60.000000\" h=\"40.000000\"/>";
inline constexpr const char* kBox = "<box w=\"60.000000\" h=\"40.000000\"/>";
inline constexpr const char* kToken = "<token x=\"-10.000000\" y=\"0.000000\"/>";
inline constexpr const char* kMarking =
    "<marking x=\"0.000000\" y=\"0.000000\" hidden=\"false\">"
    "<snap snap_id=\"0\" anchor.horizontal=\"0\" anchor.vertical=\"0\"/></marking>";
inline constexpr const char* kBinding = "<binding x=\"7.200000\" y=\"-3.000000\"/>";

}  // namespace smd2cpn::cpn_tools
