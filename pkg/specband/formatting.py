class Format:
    """
    Console formatting codes.
    """

    RED = "\033[91m"
    BLUE = "\033[94m"
    GREEN = "\033[92m"
    YELLOW = "\033[93m"

    BOLD = "\033[1m"

    RESET = "\033[0m"

    ERROR = RED
    PASS = GREEN
    FAIL = RED

    @staticmethod
    def status(ok: bool | None) -> str:
        """
        Coloured status tag for a check or artifact.

        Args:
            ok: True for pass, False for fail, None for skipped.

        Returns:
            The tag, including the reset code.
        """

        if ok is None:
            return f"{Format.YELLOW}skip{Format.RESET}"

        return f"{Format.PASS}pass{Format.RESET}" if ok else f"{Format.BOLD}{Format.FAIL}FAIL{Format.RESET}"
