"""Repository-local entry points and bootstrap helpers."""
