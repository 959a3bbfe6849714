"""Performance measures and result export."""
