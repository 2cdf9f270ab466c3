"""Perfect sampling of uniform proper k-colorings with bounding chains."""
