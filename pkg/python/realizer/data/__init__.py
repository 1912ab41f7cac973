"""Instance families and fixture generation."""
