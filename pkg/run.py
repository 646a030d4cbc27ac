"""Entry point for the doublefold command line."""

from app.main import main


if __name__ == "__main__":
    raise SystemExit(main())
