# pytest package: lets test modules share conftest helpers
