# namespace shared by the damsenviet distributions (pzf, kle, ...)
__import__("pkg_resources").declare_namespace(__name__)
