package app.test;

import data.Repository;
import junit.framework.TestCase;

public class UserTest extends TestCase {
    private Repository repo;

    protected void setUp() {
        repo = new Repository();
    }

    public void testSaveUser() {
        repo.save("user");
        assertEquals(1, repo.count());
    }
}
